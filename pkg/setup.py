#!/usr/bin/python3.10
"""
setup function to be run when creating packages
command to be typed in:
python setup.py sdist bdist_wheel
"""

from setuptools import setup

setup(
    name='impulse-sim',  # package name, used at pip or tar.
    version='0.1.0',
    # ATTENTION: every top-level package and sub-package of the simulator is listed
    packages=["imp_macro", "imp_isa", "imp_mapper", "imp_runtime", "imp_energy", "imp_oracle", "imp_cli",
              "imp_config", "imp_messages", "log_tools", "sql_access", "sql_bases",
              "sql_bases/sqlbase_trace",
              ],
    include_package_data=True,
    license='MIT',
    description='Bit-accurate simulator of a fused weight / membrane-potential CIM SRAM macro for SNN inference',
    install_requires=[
        "numpy",
        "pydantic>=2",
        "python-dotenv",
        "sqlalchemy",
    ],
    extras_require={
        "test": ["pytest", "hypothesis"],
    },
    entry_points={
        "console_scripts": ["impulse-sim = imp_cli.commands:main"],
    },
    dependency_links=[],
    classifiers=[
        'Programming Language :: Python :: 3',
        'Programming Language :: Python :: 3.10',
        'License :: OSI Approved :: MIT License',
        'Operating System :: OS Independent',
    ],
    python_requires='>=3.10',
)
