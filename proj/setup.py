"""Builds the _parsrec extension with CMake and drops it into the package."""
import subprocess
import sys
from pathlib import Path

from setuptools import setup
from setuptools.command.build_ext import build_ext
from setuptools.extension import Extension


class CMakeExtension(Extension):
    def __init__(self, name):
        super().__init__(name, sources=[])


class CMakeBuild(build_ext):
    def build_extension(self, ext):
        source_dir = Path(__file__).parent.resolve()
        build_dir = Path(self.build_temp).resolve()
        out_dir = Path(self.get_ext_fullpath(ext.name)).parent.resolve()
        build_dir.mkdir(parents=True, exist_ok=True)
        subprocess.run(
            [
                "cmake", str(source_dir),
                "-DCMAKE_BUILD_TYPE=Release",
                "-DPARSREC_BUILD_PYTHON=ON",
                "-DSKBUILD=ON",  # skips the test tree
                f"-DPython3_EXECUTABLE={sys.executable}",
                f"-DCMAKE_LIBRARY_OUTPUT_DIRECTORY={out_dir}",
            ],
            cwd=build_dir, check=True,
        )
        subprocess.run(
            ["cmake", "--build", str(build_dir), "--target", "_parsrec", "-j"],
            check=True,
        )


setup(
    ext_modules=[CMakeExtension("parsrec._parsrec")],
    cmdclass={"build_ext": CMakeBuild},
)
