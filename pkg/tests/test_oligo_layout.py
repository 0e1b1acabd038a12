import io

import numpy as np
import pytest

from dna_image_store.dna.address import (
    ADDRESS_LENGTH,
    Address,
    pack_address,
    unpack_address,
)
from dna_image_store.dna.color_code import (
    CORRECTABLE_ERRORS,
    MIN_COLOR_DISTANCE,
    decode_color,
    encode_color,
)
from dna_image_store.dna.constraints import (
    MAX_CG_RUN,
    hamming,
    max_cg_run,
    satisfies_block_constraints,
)
from dna_image_store.dna.fasta import (
    FastaRecord,
    format_fasta,
    parse_fasta,
    read_fasta,
    read_sequence_lines,
    write_fasta,
    write_sequence_lines,
)
from dna_image_store.dna.oligo import OLIGO_LENGTH, PAYLOAD_START, assemble_oligo, parse_oligo
from dna_image_store.dna.pool import pool_statistics, select_level
from dna_image_store.dna.primers import (
    MAX_PAIR_TM_DELTA,
    MIN_PRIMER_DISTANCE,
    PrimerSet,
    design_primers,
    wallace_tm,
)
from dna_image_store.exceptions import (
    AmbiguousDecodeError,
    CapacityError,
    InvalidInputError,
    PrimerDesignError,
)
from dna_image_store.utils.oligo_id import OligoId


def _mutate(sequence: str, positions) -> str:
    swap = {"A": "C", "C": "G", "G": "T", "T": "A"}
    chars = list(sequence)
    for p in positions:
        chars[p] = swap[chars[p]]
    return "".join(chars)


def _random_bits(rng, count: int) -> str:
    return "".join(map(str, rng.integers(0, 2, size=count).tolist()))


def test_color_code():
    assert [encode_color(c) for c in "RGB"] == ["ATC", "TCG", "GAT"]
    # Any two codewords differ in all three positions
    assert MIN_COLOR_DISTANCE == 3
    assert CORRECTABLE_ERRORS == 1

    assert decode_color("TCG").tag == "G"
    assert not decode_color("TCG").corrected
    # One substitution is corrected
    decoded = decode_color("ATG")
    assert decoded.tag == "R" and decoded.corrected
    for tag in "RGB":
        for p in range(3):
            assert decode_color(_mutate(encode_color(tag), [p])).tag == tag

    # Two codewords at distance 2
    with pytest.raises(AmbiguousDecodeError):
        decode_color("AAA")
    with pytest.raises(InvalidInputError):
        decode_color("AT")
    with pytest.raises(InvalidInputError):
        encode_color("Y")


def test_pack_address():
    assert pack_address(1, 2, 3) == "0001" + "010" + "00000000011"
    assert unpack_address(pack_address(15, 7, 2047)) == (15, 7, 2047)
    assert unpack_address("0" * 18) == (0, 0, 0)
    with pytest.raises(CapacityError):
        pack_address(16, 0, 0)
    with pytest.raises(CapacityError):
        pack_address(0, 0, 2048)
    with pytest.raises(InvalidInputError):
        pack_address(0, -1, 0)
    with pytest.raises(InvalidInputError):
        unpack_address("01")


def test_address_round_trip(address_codebook):
    rng = np.random.default_rng(5)
    for _ in range(200):
        address = Address(
            color=str(rng.choice(list("RGB"))),
            image=int(rng.integers(0, 16)),
            level=int(rng.integers(0, 8)),
            block=int(rng.integers(0, 2048)),
        )
        word = address.to_nucleotides()
        assert len(word) == ADDRESS_LENGTH
        assert satisfies_block_constraints(word[3:])
        assert decode_color(word[:3]).tag == address.color
        packed = address_codebook.decode_block(word[3:])
        assert packed.distance == 0
        assert unpack_address(packed.bits) == (address.image, address.level, address.block)


def test_primer_set_properties(primer_set):
    assert len(primer_set.pairs) == 8
    assert [p.level for p in primer_set.pairs] == list(range(8))
    primers = primer_set.primers()
    assert all(len(p) == 20 and satisfies_block_constraints(p) for p in primers)
    # Pairwise distance over all sixteen primers
    assert primer_set.min_distance() >= MIN_PRIMER_DISTANCE
    # Melting temperatures of a pair agree
    assert all(p.tm_delta <= MAX_PAIR_TM_DELTA for p in primer_set.pairs)

    assert PrimerSet.from_pairs(primer_set.to_pairs()) == primer_set
    with pytest.raises(InvalidInputError):
        primer_set.pair_for(8)


def test_primer_design_is_seeded():
    assert design_primers(11, pair_count=2) == design_primers(11, pair_count=2)
    assert design_primers(11, pair_count=2) != design_primers(12, pair_count=2)
    with pytest.raises(PrimerDesignError):
        design_primers(0, attempts=5)


def test_wallace_tm():
    assert wallace_tm("AT") == 4
    assert wallace_tm("GC") == 8
    assert wallace_tm("ACGTACGTACGTACGTACGT") == 60


def test_nearest_level(primer_set):
    pair = primer_set.pair_for(3)
    assert primer_set.nearest_level(pair.forward, pair.reverse) == 3
    # Four substitutions per flank still match
    assert primer_set.nearest_level(_mutate(pair.forward, range(4)), _mutate(pair.reverse, range(4))) == 3
    # Unrelated flanks match nothing
    assert primer_set.nearest_level("A" * 20, "T" * 20) is None


def test_oligo_assembly(primer_set):
    rng = np.random.default_rng(6)
    bits = _random_bits(rng, 242)
    oligo = assemble_oligo(primer_set.pair_for(4), Address("G", 2, 4, 77), bits)
    sequence = oligo.sequence
    assert len(sequence) == OLIGO_LENGTH == 196
    assert str(oligo) == sequence
    assert sequence.startswith(primer_set.pair_for(4).forward)
    assert sequence.endswith(primer_set.pair_for(4).reverse)
    assert len(oligo.blocks) == 11
    assert all(satisfies_block_constraints(b) for b in oligo.blocks)

    parsed = parse_oligo(sequence, primer_set)
    assert parsed.payload_bits == bits
    assert parsed.corrected_blocks == 0
    assert parsed.primer_level == 4
    assert parsed.address == Address("G", 2, 4, 77).to_nucleotides()

    # A damaged payload block is flagged
    damaged = _mutate(sequence, [PAYLOAD_START + 2])
    assert parse_oligo(damaged).corrected_blocks <= 1

    with pytest.raises(InvalidInputError):
        assemble_oligo(primer_set.pair_for(0), Address("R", 0, 0, 0), bits[:-1])
    with pytest.raises(InvalidInputError):
        parse_oligo(sequence[:-1])
    with pytest.raises(InvalidInputError):
        parse_oligo(sequence[:-1] + "N")


def test_unknown_primers_parse_positionally(primer_set, caplog):
    rng = np.random.default_rng(7)
    bits = _random_bits(rng, 242)
    sequence = assemble_oligo(primer_set.pair_for(0), Address("R", 0, 0, 0), bits).sequence
    foreign = "A" * 20 + sequence[20:-20] + "T" * 20
    parsed = parse_oligo(foreign, primer_set)
    assert parsed.primer_level is None
    assert parsed.payload_bits == bits
    assert "Unknown primers" in caplog.text


def test_oligo_id():
    oligo_id = OligoId.build(0, "R", 7, 12)
    assert oligo_id == "img0_R7_blk12"
    assert oligo_id == ">img0_R7_blk12"
    assert (oligo_id.image, oligo_id.color, oligo_id.level, oligo_id.block) == (0, "R", 7, 12)
    assert oligo_id.read is None
    assert oligo_id.stream_key == (0, "R", 7)

    read_id = OligoId("> img3_B0_blk2_read9 ")
    assert read_id.read == 9
    assert read_id.source == "img3_B0_blk2"
    assert len({OligoId("img1_G1_blk1"), OligoId(">img1_G1_blk1")}) == 1

    with pytest.raises(InvalidInputError):
        OligoId("img1_X1_blk1")
    with pytest.raises(InvalidInputError):
        OligoId("img1_R8_blk1")
    with pytest.raises(TypeError):
        OligoId(5)


def test_fasta_parsing():
    text = io.StringIO(
        "; pool written by a test\n"
        ">img0_R1_blk0 first record\n"
        "ACGT\n"
        "acgt\n"
        "\n"
        ">img0_R1_blk1\n"
        "TTTT\n"
    )
    records = list(parse_fasta(text))
    # Wrapped lines are joined and upper-cased
    assert records[0] == FastaRecord(OligoId("img0_R1_blk0"), "ACGTACGT", "first record")
    assert records[1].sequence == "TTTT"
    assert records[1].description == ""

    with pytest.raises(InvalidInputError):
        list(parse_fasta(io.StringIO("ACGT\n>img0_R1_blk0\nA\n")))
    with pytest.raises(InvalidInputError):
        list(parse_fasta(io.StringIO(">not_an_id\nA\n")))

    out = io.StringIO()
    format_fasta(records, out)
    assert out.getvalue() == ">img0_R1_blk0 first record\nACGTACGT\n>img0_R1_blk1\nTTTT\n"


def test_fasta_files(tmp_path):
    records = [FastaRecord(OligoId.build(1, "G", 2, b), "ACGT" * (b + 1)) for b in range(3)]
    write_fasta(tmp_path / "pool.fasta", records)
    assert read_fasta(tmp_path / "pool.fasta") == records

    write_sequence_lines(tmp_path / "pool.txt", [r.sequence for r in records])
    assert read_sequence_lines(tmp_path / "pool.txt") == [r.sequence for r in records]


def test_select_level(primer_set):
    rng = np.random.default_rng(8)
    records = [
        FastaRecord(
            OligoId.build(0, "R", level, 0),
            assemble_oligo(
                primer_set.pair_for(level), Address("R", 0, level, 0), _random_bits(rng, 242)
            ).sequence,
        )
        for level in range(8)
    ]
    # One damaged flank is still amplified by its pair
    records[5] = FastaRecord(records[5].id, _mutate(records[5].sequence, [0, 1, 2]))
    # Records of the wrong length are skipped
    records.append(FastaRecord(OligoId.build(0, "R", 5, 1), records[5].sequence[:-1]))

    selected = select_level(records, primer_set, 5)
    assert [r.id for r in selected] == ["img0_R5_blk0"]
    assert [r.id.level for r in select_level(records, primer_set, 2)] == [2]
    with pytest.raises(InvalidInputError):
        select_level(records, primer_set, 9)


def test_pool_statistics(primer_set):
    rng = np.random.default_rng(9)
    sequences = [
        assemble_oligo(
            primer_set.pair_for(level), Address("B", 1, level, 3), _random_bits(rng, 242)
        ).sequence
        for level in range(8)
    ]
    stats = pool_statistics(sequences + ["ACGT"])
    assert stats.oligo_count == 9
    assert stats.total_nucleotides == 8 * 196 + 4
    assert stats.length_histogram == {4: 1, 196: 8}
    # Payload blocks carry 6 or 7 G/C of 13
    assert set(stats.block_gc_histogram) <= {6, 7}
    assert sum(stats.block_gc_histogram.values()) == 8 * 11
    assert stats.longest_cg_run == max(max_cg_run(s) for s in sequences)
    assert stats.cross_block_run_oligos == sum(max_cg_run(s) > MAX_CG_RUN for s in sequences)
    assert all(hamming(s[:20], primer_set.pair_for(i).forward) == 0 for i, s in enumerate(sequences))
