import plots


def test_scaling_plot(tmp_path):
    path = tmp_path / "scaling.png"
    assert plots.make_scaling_plot(str(path), "Update rate", [1, 2, 4],
                                   [100, 190, 350], [1.0, 0.95, 0.875])
    assert path.stat().st_size > 0


def test_scaling_plot_needs_two_points(tmp_path):
    path = tmp_path / "scaling.png"
    assert not plots.make_scaling_plot(str(path), "Update rate", [1], [100])
    assert not path.exists()
