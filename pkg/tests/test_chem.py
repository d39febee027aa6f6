"""FCIDUMP parsing, active-space reduction and geometry construction."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vqepes.chem import (
    ActiveSpaceSpec,
    FcidumpError,
    FermionicHamiltonian,
    build_geometry,
    load_manifest,
    parse_fcidump,
    reduce_active_space,
    serialize_fcidump,
)

from oracles import fock_matrix, random_fermionic_hamiltonian, sector_indices

MINIMAL = """\
&FCI NORB=1,NELEC=2,MS2=0,
&END
0.5 1 1 1 1
-1.0 1 1 0 0
0.7 0 0 0 0
"""


def test_parse_minimal_example():
    h = parse_fcidump(MINIMAL)
    assert h.n_spatial == 1
    assert h.n_alpha == h.n_beta == 1
    assert h.h2[0, 0, 0, 0] == 0.5
    assert h.h1[0, 0] == -1.0
    assert h.e_core == 0.7


def test_parse_duplicate_identical_entries_idempotent():
    text = MINIMAL + "0.5 1 1 1 1\n"
    h = parse_fcidump(text)
    assert h.h2[0, 0, 0, 0] == 0.5


def test_parse_conflicting_duplicate_rejected():
    text = MINIMAL + "0.6 1 1 1 1\n"
    with pytest.raises(FcidumpError, match="conflicts"):
        parse_fcidump(text)


def test_parse_symmetry_fill():
    text = """\
&FCI NORB=2,NELEC=2,MS2=0,
&END
0.25 1 2 1 1
-0.5 2 1 0 0
0.0 0 0 0 0
"""
    h = parse_fcidump(text)
    # all eight permutational images of (12|11)
    for idx in [(0, 1, 0, 0), (1, 0, 0, 0), (0, 0, 0, 1), (0, 0, 1, 0)]:
        assert h.h2[idx] == 0.25
    assert h.h1[0, 1] == -0.5 and h.h1[1, 0] == -0.5


def test_parse_index_out_of_range():
    with pytest.raises(FcidumpError, match=r"outside \[1, 1\]"):
        parse_fcidump("&FCI NORB=1,NELEC=2,MS2=0,\n&END\n0.5 1 2 1 1\n")


def test_parse_missing_header_key():
    with pytest.raises(FcidumpError, match="NELEC"):
        parse_fcidump("&FCI NORB=1,MS2=0\n&END\n0.0 0 0 0 0\n")


def test_parse_bad_first_line():
    with pytest.raises(FcidumpError, match="line 1"):
        parse_fcidump("NORB=1,NELEC=2,MS2=0\n&END\n")


def test_parse_unterminated_header():
    with pytest.raises(FcidumpError, match="terminated"):
        parse_fcidump("&FCI NORB=1,NELEC=2,MS2=0,\n0.5 1 1 1 1\n")


def test_parse_malformed_record_names_line():
    with pytest.raises(FcidumpError, match="line 3"):
        parse_fcidump("&FCI NORB=1,NELEC=2,MS2=0,\n&END\n0.5 1 1 1\n")


def test_parse_electron_overflow_rejected():
    with pytest.raises(FcidumpError):
        parse_fcidump("&FCI NORB=1,NELEC=4,MS2=0,\n&END\n0.0 0 0 0 0\n")


def test_parse_accepts_fortran_exponent_and_slash_terminator():
    text = " &FCI NORB=1,NELEC=2,MS2=0,\n  ORBSYM=1,\n  ISYM=1,\n /\n1.0D-01 1 1 0 0\n"
    h = parse_fcidump(text)
    assert h.h1[0, 0] == pytest.approx(0.1)


def test_serialize_parse_roundtrip_is_fixed_point():
    rng = np.random.default_rng(11)
    for n, na, nb in [(1, 1, 1), (2, 1, 1), (3, 2, 2)]:
        h = random_fermionic_hamiltonian(n, na, nb, rng)
        h2 = parse_fcidump(serialize_fcidump(h))
        h3 = parse_fcidump(serialize_fcidump(h2))
        assert np.allclose(h2.h1, h.h1, atol=1e-12)
        assert np.allclose(h2.h2, h.h2, atol=1e-12)
        assert h2.e_core == pytest.approx(h.e_core, abs=1e-12)
        assert np.array_equal(h2.h1, h3.h1)
        assert np.array_equal(h2.h2, h3.h2)
        assert (h2.n_alpha, h2.n_beta) == (h.n_alpha, h.n_beta)


def test_invariant_validation_rejects_asymmetric_h1():
    h1 = np.array([[0.0, 1.0], [0.5, 0.0]])
    with pytest.raises(ValueError, match="symmetric"):
        FermionicHamiltonian(n_alpha=1, n_beta=1, e_core=0.0, h1=h1, h2=np.zeros((2, 2, 2, 2)))


# -- active-space reduction --------------------------------------------------


def test_reduce_empty_spec_is_identity():
    rng = np.random.default_rng(5)
    h = random_fermionic_hamiltonian(2, 1, 1, rng)
    reduced = reduce_active_space(h, ActiveSpaceSpec())
    assert reduced.e_core == h.e_core
    assert np.array_equal(reduced.h1, h.h1)
    assert np.array_equal(reduced.h2, h.h2)
    assert (reduced.n_alpha, reduced.n_beta) == (h.n_alpha, h.n_beta)


def test_reduce_frozen_orbital_matches_fock_sector():
    rng = np.random.default_rng(17)
    h = random_fermionic_hamiltonian(2, 2, 2, rng)  # orbitals 0,1 doubly occupied
    reduced = reduce_active_space(h, ActiveSpaceSpec(frozen=(0,)))
    assert reduced.n_spatial == 1
    assert (reduced.n_alpha, reduced.n_beta) == (1, 1)

    # sector of the original with modes of orbital 0 occupied and 4 electrons
    full = fock_matrix(h)
    frozen_modes = (0, 2)  # alpha and beta copies of orbital 0
    idx = sector_indices(4, 4, frozen_modes=frozen_modes)
    sector_energy = np.linalg.eigvalsh(full[np.ix_(idx, idx)]).min()

    reduced_full = fock_matrix(reduced)
    idx_red = sector_indices(2, 2)
    reduced_energy = np.linalg.eigvalsh(reduced_full[np.ix_(idx_red, idx_red)]).min()
    assert reduced_energy == pytest.approx(sector_energy, abs=1e-9)


@pytest.mark.parametrize(
    "n,na,nb,frozen,removed",
    [
        (2, 1, 1, (), (1,)),
        (3, 2, 2, (0,), ()),
        (3, 2, 2, (0, 1), ()),
        (3, 1, 1, (0,), (2,)),
    ],
)
def test_reduce_random_matches_fock_sector(n, na, nb, frozen, removed):
    rng = np.random.default_rng(100 * n + 10 * na + len(frozen))
    h = random_fermionic_hamiltonian(n, na, nb, rng)
    reduced = reduce_active_space(h, ActiveSpaceSpec(frozen=frozen, removed=removed))

    frozen_modes = tuple(frozen) + tuple(i + n for i in frozen)
    removed_modes = tuple(removed) + tuple(i + n for i in removed)
    electrons = na + nb
    idx = sector_indices(2 * n, electrons, frozen_modes, removed_modes)
    sector_energy = np.linalg.eigvalsh(fock_matrix(h)[np.ix_(idx, idx)]).min()

    n_active = reduced.n_spatial
    idx_red = sector_indices(2 * n_active, reduced.n_electrons)
    reduced_energy = np.linalg.eigvalsh(fock_matrix(reduced)[np.ix_(idx_red, idx_red)]).min()
    assert reduced_energy == pytest.approx(sector_energy, abs=1e-9)


def test_reduce_rejects_unoccupied_frozen():
    rng = np.random.default_rng(2)
    h = random_fermionic_hamiltonian(2, 1, 1, rng)  # only orbital 0 occupied
    with pytest.raises(ValueError, match="doubly occupied"):
        reduce_active_space(h, ActiveSpaceSpec(frozen=(1,)))


def test_reduce_rejects_occupied_removed():
    rng = np.random.default_rng(2)
    h = random_fermionic_hamiltonian(2, 1, 1, rng)
    with pytest.raises(ValueError, match="occupied"):
        reduce_active_space(h, ActiveSpaceSpec(removed=(0,)))


def test_reduce_rejects_half_occupied_frozen_or_removed():
    rng = np.random.default_rng(2)
    h = random_fermionic_hamiltonian(2, 2, 1, rng)  # orbital 1 alpha-occupied only
    with pytest.raises(ValueError, match="doubly occupied"):
        reduce_active_space(h, ActiveSpaceSpec(frozen=(1,)))
    with pytest.raises(ValueError, match="occupied"):
        reduce_active_space(h, ActiveSpaceSpec(removed=(1,)))


def test_reduce_rejects_empty_active_space():
    rng = np.random.default_rng(2)
    h = random_fermionic_hamiltonian(2, 2, 2, rng)
    with pytest.raises(ValueError, match="empty"):
        reduce_active_space(h, ActiveSpaceSpec(frozen=(0, 1)))


def test_active_space_spec_rejects_overlap():
    with pytest.raises(ValueError):
        ActiveSpaceSpec(frozen=(0,), removed=(0,))


# -- geometry ----------------------------------------------------------------


def test_geometry_right_angle():
    g = build_geometry(90.0, 1.0)
    assert np.allclose(g.coordinates[1], [math.sqrt(0.5), math.sqrt(0.5), 0.0], atol=1e-10)


def test_geometry_collinear():
    g = build_geometry(180.0 - 1e-9, 1.0)
    assert np.allclose(g.coordinates[1], [1.0, 0.0, 0.0], atol=1e-6)
    assert np.allclose(g.coordinates[2], [-1.0, 0.0, 0.0], atol=1e-6)


def test_geometry_water_hh_distance():
    g = build_geometry(104.5, 0.945)
    hh = np.linalg.norm(g.coordinates[1] - g.coordinates[2])
    assert hh == pytest.approx(2.0 * 0.945 * math.sin(math.radians(52.25)), abs=1e-12)
    assert hh == pytest.approx(1.4944, abs=1e-4)


def test_geometry_rejects_out_of_range():
    with pytest.raises(ValueError):
        build_geometry(0.0, 1.0)
    with pytest.raises(ValueError):
        build_geometry(180.0, 1.0)
    with pytest.raises(ValueError):
        build_geometry(104.5, -0.1)


@settings(max_examples=50, deadline=None)
@given(
    angle=st.floats(min_value=1e-3, max_value=179.999),
    length=st.floats(min_value=1e-3, max_value=10.0),
)
def test_geometry_invariants(angle, length):
    g = build_geometry(angle, length)
    o, h1, h2 = g.coordinates
    d1, d2 = np.linalg.norm(h1 - o), np.linalg.norm(h2 - o)
    assert d1 == pytest.approx(length, abs=1e-12 * max(1.0, length))
    assert d2 == pytest.approx(length, abs=1e-12 * max(1.0, length))
    # atan2 of cross/dot is well conditioned at both ends of the angle range
    cross = np.linalg.norm(np.cross(h1 - o, h2 - o))
    measured = math.degrees(math.atan2(cross, np.dot(h1 - o, h2 - o)))
    assert measured == pytest.approx(angle, abs=1e-10)


# -- manifests ---------------------------------------------------------------


@pytest.fixture()
def fcidump_file(tmp_path):
    rng = np.random.default_rng(0)
    h = random_fermionic_hamiltonian(2, 1, 1, rng)
    path = tmp_path / "test.fcidump"
    path.write_text(serialize_fcidump(h))
    return path


def test_manifest_single_entry(fcidump_file, tmp_path):
    text = f"# basis: STO-3G\n# freeze: 0\n# remove:\n104.5 0.945 {fcidump_file.name}\n"
    manifest = load_manifest(text, base_dir=tmp_path)
    assert len(manifest.entries) == 1
    assert manifest.entries[0].geometry.bond_angle == 104.5
    assert manifest.metadata.basis == "STO-3G"
    assert manifest.metadata.active_space() == ActiveSpaceSpec(frozen=(0,))


def test_manifest_empty_rejected():
    with pytest.raises(ValueError, match="no scan entries"):
        load_manifest("# nothing here\n")


def test_manifest_missing_file(tmp_path):
    with pytest.raises(FileNotFoundError, match="nope.fcidump"):
        load_manifest("100.0 1.0 nope.fcidump\n", base_dir=tmp_path)


def test_manifest_duplicate_geometry(fcidump_file, tmp_path):
    other = tmp_path / "other.fcidump"
    other.write_text(fcidump_file.read_text())
    text = f"100.0 1.0 {fcidump_file.name}\n100.0 1.0 {other.name}\n"
    with pytest.raises(ValueError, match="duplicate geometry"):
        load_manifest(text, base_dir=tmp_path)


def test_manifest_duplicate_path(fcidump_file, tmp_path):
    text = f"100.0 1.0 {fcidump_file.name}\n101.0 1.0 {fcidump_file.name}\n"
    with pytest.raises(ValueError, match="duplicate path"):
        load_manifest(text, base_dir=tmp_path)


def test_manifest_orders_entries(fcidump_file, tmp_path):
    names = []
    for i in range(3):
        p = tmp_path / f"g{i}.fcidump"
        p.write_text(fcidump_file.read_text())
        names.append(p.name)
    text = "".join(f"{90.0 + i} 1.0 {name}\n" for i, name in enumerate(names))
    manifest = load_manifest(text, base_dir=tmp_path)
    assert [e.geometry.bond_angle for e in manifest.entries] == [90.0, 91.0, 92.0]
