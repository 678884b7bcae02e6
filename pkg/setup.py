import pathlib
import setuptools

setuptools.setup(
    name='cip4helm',
    version='0.1.0',
    description='Continuous interior penalty finite elements for the 1D Helmholtz equation: '
                'solver, dispersion analysis, discrete Green\'s functions and error sweeps',
    long_description=pathlib.Path("README.md").read_text(),
    long_description_content_type="text/markdown",
    license='EUPL-1.2',
    install_requires=[
        "numpy",
        "pandas",
        "scipy",
    ],
    extras_require={
        'test': [
            "hypothesis",
            "pytest",
        ],
    },
    entry_points={
        'console_scripts': [
            'cip4helm=cip4helm.cli:main',
        ],
    },

    classifiers=[
        'Development Status :: 3 - Alpha',
        'Intended Audience :: Science/Research',
        'License :: OSI Approved :: European Union Public Licence 1.2 (EUPL 1.2)',
        'Programming Language :: Python :: 3.9',
        'Programming Language :: Python :: 3.10',
        'Programming Language :: Python :: 3.11',
        'Programming Language :: Python :: 3.12',
    ],
    python_requires='>=3.9',
    packages=setuptools.find_packages(),
    include_package_data=True
)
