# CMake-backed extension build: configures the C++ project with only the
# pybind11 target enabled and drops the built module into the wheel.
import subprocess
import sys
from pathlib import Path

from setuptools import Extension, setup
from setuptools.command.build_ext import build_ext


class CMakeExtension(Extension):
    def __init__(self, name):
        super().__init__(name, sources=[])


class CMakeBuild(build_ext):
    def build_extension(self, ext):
        import pybind11

        source_dir = Path(__file__).resolve().parent
        build_dir = Path(self.build_temp).resolve() / "cmake"
        build_dir.mkdir(parents=True, exist_ok=True)

        subprocess.run(
            [
                "cmake",
                str(source_dir),
                "-DCMAKE_BUILD_TYPE=Release",
                "-DG2FIT_BUILD_PYTHON=ON",
                "-DG2FIT_BUILD_TESTS=OFF",
                "-DG2FIT_BUILD_CLI=OFF",
                f"-Dpybind11_DIR={pybind11.get_cmake_dir()}",
                f"-DPython_EXECUTABLE={sys.executable}",
            ],
            cwd=build_dir,
            check=True,
        )
        subprocess.run(
            ["cmake", "--build", ".", "--target", "_core", "--parallel"],
            cwd=build_dir,
            check=True,
        )

        built = sorted(build_dir.glob("_core.*"))
        if not built:
            raise RuntimeError("extension module not produced by the CMake build")
        dest = Path(self.get_ext_fullpath(ext.name)).resolve()
        dest.parent.mkdir(parents=True, exist_ok=True)
        self.copy_file(str(built[0]), str(dest))


setup(
    ext_modules=[CMakeExtension("g2fit._core")],
    cmdclass={"build_ext": CMakeBuild},
)
