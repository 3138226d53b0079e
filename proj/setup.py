from pybind11.setup_helpers import Pybind11Extension, build_ext
from setuptools import setup

core = Pybind11Extension(
    "minlab._core",
    [
        "bindings/module.cpp",
        "src/forcing.cpp",
        "src/solver.cpp",
        "src/omega.cpp",
        "src/oracle.cpp",
        "src/experiments.cpp",
    ],
    include_dirs=["include", "vendor"],
    cxx_std=20,
    # Keep sums association-exact so results match the CLI bit for bit.
    extra_compile_args=["-ffp-contract=off"],
)

setup(ext_modules=[core], cmdclass={"build_ext": build_ext})
