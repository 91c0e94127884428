from setuptools import setup, find_packages

# Read requirements from requirements.txt
with open('requirements.txt') as f:
    required = f.read().splitlines()
setup(
    name="clarkson-mcleod-tools",
    version="1.0.0",
    packages=find_packages(exclude=['tests', 'tests.*']),
    install_requires=required,
    extras_require={
        'dev': [
            'pytest>=7.0',
            'hypothesis>=6.0',
            'mpmath>=1.2',
        ],
    },
    entry_points={
        'console_scripts': [
            'clarkson-mcleod-tools=clarkson_mcleod_tools.cli:main',
        ],
    },
    author="JaegerMaster",
    description="Numerical solutions, connection constants and pole fields of Painleve IV Clarkson-McLeod solutions",
    python_requires=">=3.8",
)
