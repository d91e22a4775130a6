"""Gaussian-splat reconstruction toolkit for object captures."""

from ._core import (
    Camera,
    Error,
    Gaussian,
    GaussianCloud,
    TriangleMesh,
    clean,
    clean_mesh,
    config_json,
    config_keys,
    euler_characteristic,
    evaluate,
    extract,
    import_sfm,
    iou,
    load_cloud,
    mse,
    prep,
    psnr,
    psnr_from_mse,
    read_mesh,
    render,
    save_cloud,
    synth,
    train,
    validate_clean,
    write_mesh,
)

__all__ = [name for name in dir() if not name.startswith("_")]
