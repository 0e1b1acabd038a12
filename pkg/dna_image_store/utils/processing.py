from typing import Any, Hashable, Iterable, Mapping, Optional

from dna_image_store.exceptions import InvalidInputError


def group_entries(
    entries: Iterable[Mapping[str, Any]],
    variables: Optional[list[str]] = None,
    grouping_variables: Optional[list[str]] = None,
) -> tuple[tuple[Any, ...], ...] | tuple[Any, ...] | dict:
    """
    Project flat entries onto tuples, or group them into a nested dictionary.

    Args:
        entries (Iterable[Mapping[str, Any]]): Records with named fields, e.g.
            one per parsed oligo.
        variables (Optional[list[str]]): Fields that define the tuple entries and
            their order in the result.
        grouping_variables (Optional[list[str]]): Fields that define the
            hierarchical dictionary keys, outermost first.

    Returns:
        tuple[tuple[Any, ...], ...] | tuple[Any, ...] | dict: Without
            `grouping_variables`:
            - variables is empty or None -> () (empty tuple)
            - variables has length 1     -> (a1, a2, ...)
            - variables has length > 1   -> ((a1, b1, ...), (a2, b2, ...), ...)
            With `grouping_variables`, a nested dict keyed by their values whose
            leaves are tuples shaped as above, in input order.

    Raises:
        InvalidInputError: If a grouping value is not hashable, or if the entries
            are empty and neither argument is given.
    """
    entries = list(entries)

    if not variables and not grouping_variables:
        if not entries:
            raise InvalidInputError(
                "Cannot determine result structure without variables or grouping_variables for empty entries."
            )
        variables = list(entries[0].keys())

    if not variables:
        extract_entry = lambda entry: None
    elif len(variables) == 1:
        extract_entry = lambda entry: entry[variables[0]]
    else:
        extract_entry = lambda entry: tuple(entry[variable] for variable in variables)

    if not grouping_variables:
        if not variables:
            return ()
        return tuple(extract_entry(entry) for entry in entries)

    result = {}
    leaf_dicts = []
    for entry in entries:
        if not all(isinstance(entry[key], Hashable) for key in grouping_variables):
            raise InvalidInputError("All values of grouping_variables must be hashable.")
        leaf = result
        for key in grouping_variables[:-1]:
            leaf = leaf.setdefault(entry[key], {})
        leaf.setdefault(entry[grouping_variables[-1]], []).append(extract_entry(entry))
        leaf_dicts.append(leaf)

    for leaf_dict in leaf_dicts:
        for k, l in leaf_dict.items():
            leaf_dict[k] = tuple(l) if variables else tuple()

    return result
