import os
from setuptools import setup, find_packages
from setuptools.command.install import install
from setuptools.command.develop import develop
import pathlib
import shutil

NAME = 'iwapipe'
DESCRIPTION = "Exact computation and verification in truncated completed group rings of p-adic groups"
URL = ''
EMAIL = ''
AUTHOR = ''
KEYWORDS = 'iwasawa algebra p-adic group ring finite field verification'
REQUIRES_PYTHON = '>=3.10.0'
VERSION = '0.1.0'
LICENSE = 'MIT'

REQUIRED = [
    'numpy',
    'h5py',
    'termcolor',
    'toml',
    'tqdm',
    'colorama',
    'galois',
    'sympy',
]

EXTRAS = {
    'test': ['pytest'],
}

def read(fname):
    return open(os.path.join(os.path.dirname(__file__), fname)).read()

def post_install():
    default_path = pathlib.Path(__file__).parent / 'iwapipe' / 'default.conf'
    config_path = pathlib.Path('~/.config/iwapipe/iwapipe.conf').expanduser()
    if not os.path.exists(config_path):
        os.makedirs(config_path.parent, exist_ok=True)
        shutil.copyfile(default_path, config_path)

class PostInstallCommand(install):
    """Post-installation for installation mode."""
    def run(self):
        post_install()
        install.run(self)

class PostDevelopCommand(develop):
    """Post-installation for installation mode."""
    def run(self):
        post_install()
        develop.run(self)

setup(
    name=NAME,
    version=VERSION,
    author=AUTHOR,
    author_email=EMAIL,
    description=DESCRIPTION,
    license=LICENSE,
    keywords=KEYWORDS,
    url=URL,
    python_requires=REQUIRES_PYTHON,
    packages=find_packages(exclude=['tests']),
    package_data={'iwapipe': ['default.conf']},
    long_description=read('README.md'),
    long_description_content_type='text/markdown',
    install_requires=REQUIRED,
    extras_require=EXTRAS,
    entry_points={
        'console_scripts': ['verify=iwapipe.cli:main'],
    },
    cmdclass={
        'develop': PostDevelopCommand,
        'install': PostInstallCommand,
    },
    classifiers=[
        'License :: OSI Approved :: MIT License',
        'Programming Language :: Python',
        'Operating System :: POSIX',
        'Operating System :: MacOS',
        'Development Status :: 3 - Alpha',
    ],
)
