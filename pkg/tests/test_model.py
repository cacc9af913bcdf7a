import pytest

from xyentangle.model import (Boundary, ChainSpec, Config, ConfigError, DisorderSpec, Regime,
                              SweepSpec, config_from_mapping, h_grid, load_config, validate)


def cfg(chain=None, disorder=None, sweep=None):
    return Config(chain=chain or ChainSpec(500),
                  sweep=sweep or SweepSpec((0.0, 0.5), 5, Regime.RANDOM_ZERO_T),
                  disorder=disorder or DisorderSpec(q=2, scale_a=0.3, n_samples=10000))


def test_production_setting_is_valid():
    c = cfg()
    assert validate(c) is c


def test_minimal_chain_is_valid():
    c = Config(ChainSpec(2, 1.0, 0.0, 0.0), SweepSpec((0.0,), 0))
    with pytest.raises(ConfigError, match="r_max"):
        validate(c)
    # r_max < N/2 cannot hold for N = 2, but the chain itself is legal
    from xyentangle.model import validate_chain
    assert validate_chain(ChainSpec(2)) == ChainSpec(2)


@pytest.mark.parametrize("disorder, message", [
    (DisorderSpec(q=3.2, scale_a=1), "q must lie"),
    (DisorderSpec(q=0.9, scale_a=1), "q must lie"),
    (DisorderSpec(q=1, scale_a=-0.1), "scale_a"),
    (DisorderSpec(q=1, scale_a=1, n_samples=0), "n_samples"),
    (DisorderSpec(q=1, scale_a=1, master_seed=2**64), "master_seed"),
])
def test_disorder_invariants(disorder, message):
    with pytest.raises(ConfigError, match=message):
        validate(cfg(disorder=disorder))


@pytest.mark.parametrize("chain, message", [
    (ChainSpec(1), "n_sites"),
    (ChainSpec(10, coupling=-1.0), "coupling"),
    (ChainSpec(10, temperature=-0.1), "temperature"),
])
def test_chain_invariants(chain, message):
    with pytest.raises(ConfigError, match=message):
        validate(cfg(chain=chain))


@pytest.mark.parametrize("sweep, message", [
    (SweepSpec((), 5, Regime.RANDOM_ZERO_T), "empty"),
    (SweepSpec((0.5, 0.5), 5, Regime.RANDOM_ZERO_T), "increasing"),
    (SweepSpec((0.5,), 250, Regime.RANDOM_ZERO_T), "r_max"),
])
def test_sweep_invariants(sweep, message):
    with pytest.raises(ConfigError, match=message):
        validate(cfg(sweep=sweep))


def test_regime_temperature_consistency():
    with pytest.raises(ConfigError, match="temperature > 0"):
        validate(cfg(sweep=SweepSpec((0.0,), 5, Regime.UNIFORM_FINITE_T)))
    with pytest.raises(ConfigError, match="temperature = 0"):
        validate(cfg(chain=ChainSpec(100, temperature=0.1)))


def test_validation_is_deterministic():
    bad = cfg(disorder=DisorderSpec(q=3.2, scale_a=1))
    outcomes = []
    for _ in range(3):
        try:
            validate(bad)
            outcomes.append("ok")
        except ConfigError as exc:
            outcomes.append(str(exc))
    assert len(set(outcomes)) == 1


def test_h_grid_lands_on_nominal_points():
    grid = h_grid(0.9, 1.1, 21)
    assert grid[10] == 1.0
    assert len(grid) == 21 and grid[-1] == 1.1


def test_config_file_round_trip(tmp_path):
    path = tmp_path / "run.yaml"
    path.write_text(
        "chain:\n  n_sites: 100\n  boundary: open\n"
        "disorder:\n  q: 1.35\n  scale_a: 0.5\n  n_samples: 20\n  master_seed: 7\n"
        "sweep:\n  h_min: 0\n  h_max: 1\n  h_steps: 5\n  r_max: 3\n  regime: random_zero_t\n"
    )
    c = config_from_mapping(load_config(path))
    assert c.chain.boundary is Boundary.OPEN
    assert c.disorder.q == 1.35 and c.disorder.master_seed == 7
    assert c.sweep.h_grid == (0.0, 0.25, 0.5, 0.75, 1.0)
    assert c.sweep.regime is Regime.RANDOM_ZERO_T


def test_config_rejects_unknown_keys():
    with pytest.raises(ConfigError, match="unknown"):
        config_from_mapping({"chain": {"n_sites": 10, "gamma": 0.5}})
