import pytest

from chiralcmm import presets
from chiralcmm.cli import load_config, preset_config_text
from chiralcmm.params import errors_of, validate
from chiralcmm.pipeline import SweepAxis, SweepSpec, evaluate_point, run_sweep


class _Args:
    set = None
    drive = None
    variant = None
    filter_center = None
    filter_tau = None
    workers = 1

    def __init__(self, config):
        self.config = config


@pytest.mark.parametrize("name", presets.PRESET_NAMES)
class TestEveryPreset:
    def test_parameters_validate(self, name):
        pre = presets.get(name)
        assert errors_of(validate(pre.params)) == []

    def test_config_text_round_trip(self, name, tmp_path):
        # the serialized preset reloads into the same physical configuration
        pre = presets.get(name)
        path = tmp_path / f"{name}.cfg"
        path.write_text(preset_config_text(name), encoding="utf-8")
        cfg = load_config(_Args(str(path)))
        for attr in ("omega_a", "omega_b", "kappa_a_e", "kappa_a_i", "kappa_m",
                     "gamma_b", "g_cw", "g_ccw", "J", "temperature"):
            assert getattr(cfg.params, attr) == pytest.approx(
                getattr(pre.params, attr), rel=1e-14)
        assert cfg.params.drive.kind == pre.params.drive.kind
        assert cfg.params.drive.value == pytest.approx(pre.params.drive.value,
                                                       rel=1e-14)
        assert cfg.detunings.delta_a == pytest.approx(pre.detunings.delta_a,
                                                      rel=1e-14)
        if pre.sweep is not None:
            assert cfg.sweep is not None
            assert len(cfg.sweep.axes) == len(pre.sweep.axes)
            for got, want in zip(cfg.sweep.axes, pre.sweep.axes):
                assert got.name == want.name and got.num == want.num
                assert got.start == pytest.approx(want.start, rel=1e-14)
            assert cfg.sweep.drive_ports == pre.sweep.drive_ports
            assert cfg.sweep.variant == pre.sweep.variant

    def test_runs(self, name):
        pre = presets.get(name)
        if pre.sweep is None:
            rep = evaluate_point(pre.params, pre.detunings, "imperfect")
            assert rep.stable
            return
        # shrink every axis to 2 points: the preset must at least execute
        axes = tuple(SweepAxis(ax.name, ax.start, ax.stop, 2)
                     for ax in pre.sweep.axes)
        small = SweepSpec(axes=axes, drive_ports=pre.sweep.drive_ports,
                          variant=pre.sweep.variant, request=pre.sweep.request)
        res = run_sweep(pre.params, pre.detunings, small)
        assert all(row[-1] == "" for row in res.rows)
