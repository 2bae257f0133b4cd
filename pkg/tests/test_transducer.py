import math

import numpy as np
import pytest

from finfet_mc.constants import Q
from finfet_mc.transducer import (
    capacitance_stack,
    debye_length,
    effective_charge,
    ligand_potential,
    transducer_state,
)

# independent plain-math evaluation with hand-typed CODATA 2018 constants;
# scipy may ship newer constants, hence rel=1e-8 below
LAMBDA_D = 1.756153464769804e-09
Q_EFF = 5.1299481886568823e-20
C_OX, C_DL, C_NW, C_EQ = (4.537967051053674e-15, 1.033615146304656e-13,
                          6.653986392344825e-15, 1.0605948609356448e-13)
PSI_L = 1.4510578103682211e-06


def _with(bundle, **kw):
    return bundle.replace(**kw)


def test_debye_length(bundle):
    lam = debye_length(bundle.channel)
    assert lam == pytest.approx(LAMBDA_D, rel=1e-8)
    assert round(lam * 1e9, 2) == 1.76


def test_debye_inverse_sqrt(bundle):
    lam = debye_length(bundle.channel)
    four = debye_length(_with(bundle, **{"channel.c_ion": 120.0}).channel)
    assert four == pytest.approx(lam / 2, rel=1e-14)
    phys = debye_length(_with(bundle, **{"channel.c_ion": 150.0}).channel)
    assert phys == pytest.approx(LAMBDA_D / math.sqrt(5), rel=1e-8)


def test_effective_charge():
    assert effective_charge(1e-9, 0.0) == Q
    assert effective_charge(2e-9, 2e-9) == pytest.approx(Q / math.e, rel=1e-15)
    assert Q / math.e == pytest.approx(5.894e-20, rel=1e-3)
    assert effective_charge(LAMBDA_D, 2e-9) == pytest.approx(Q_EFF, rel=1e-8)


def test_capacitance_golden(bundle):
    st = capacitance_stack(bundle.device, bundle.channel, debye_length(bundle.channel))
    for got, want in zip((st.C_OX, st.C_DL, st.C_NW, st.C_eq), (C_OX, C_DL, C_NW, C_EQ)):
        assert got == pytest.approx(want, rel=1e-8)
    assert st.C_eq > st.C_DL


def test_capacitance_homogeneous_in_area(bundle):
    lam = debye_length(bundle.channel)
    a = capacitance_stack(bundle.device, bundle.channel, lam)
    dev2 = _with(bundle, **{"device.L_eff": 2 * bundle.device.L_eff}).device
    b = capacitance_stack(dev2, bundle.channel, lam)
    for x, y in zip((a.C_OX, a.C_DL, a.C_NW, a.C_eq), (b.C_OX, b.C_DL, b.C_NW, b.C_eq)):
        assert y == pytest.approx(2 * x, rel=1e-14)


def test_thick_oxide_limit(bundle):
    lam = debye_length(bundle.channel)
    dev = _with(bundle, **{"device.t_ox": 1.0}).device
    st = capacitance_stack(dev, bundle.channel, lam)
    assert st.C_eq == pytest.approx(st.C_DL, rel=1e-6)


def test_ligand_potential(bundle):
    st = transducer_state(bundle.device, bundle.channel, 2e-9, 3.0)
    assert st.Psi_L == pytest.approx(PSI_L, rel=1e-8)
    assert ligand_potential(st, 0.0) == 0.0
    assert ligand_potential(st, 6.0) == pytest.approx(2 * ligand_potential(st, 3.0), rel=1e-15)
    # Q = C V for the total charge of N bound ligands
    n_bound = 1234
    assert n_bound * st.Psi_L * st.C_eq == pytest.approx(n_bound * st.q_eff * 3.0, rel=1e-14)


def test_potential_falls_with_ionic_strength(bundle):
    psi = [transducer_state(bundle.device, _with(bundle, **{"channel.c_ion": float(c)}).channel,
                            2e-9, 3.0).Psi_L for c in np.geomspace(1, 1000, 30)]
    assert all(b < a for a, b in zip(psi, psi[1:]))


def test_potential_falls_with_receptor_length(bundle):
    psi = [transducer_state(bundle.device, bundle.channel, float(l), 3.0).Psi_L
           for l in np.linspace(0, 10e-9, 30)]
    assert all(b < a for a, b in zip(psi, psi[1:]))
