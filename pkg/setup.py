from setuptools import find_packages, setup

VERSION = '0.1.0.dev0'


setup(
    name='dimmatic',
    version=VERSION,
    description='Configuration-driven robustness workbench for denoised internal model classifiers on MNIST',
    classifiers=[
        'Development Status :: 3 - Alpha',
        'Environment :: Console',
        'Intended Audience :: Science/Research',
        'License :: OSI Approved :: GNU General Public License v3 (GPLv3)',
        'Programming Language :: Python',
        'Topic :: Scientific/Engineering :: Artificial Intelligence',
    ],
    packages=find_packages(exclude=['tests*']),
    entry_points={
        'console_scripts': [
            'dimmatic = dimmatic.commands.dimmatic:main',
        ]
    },
    install_requires=(
        'colorama>=0.4.1,<0.5',
        'jsonschema',
        'matplotlib>=3.5',
        'numpy>=1.22',
        'pandas',
        'ruamel.yaml>0.15.0,<0.18.0',
        'scikit-learn',
        'scipy',
        'setuptools',
    ),
    include_package_data=True,
    package_data={'dimmatic.config': ['schema.yaml']},
    python_requires='>=3.9',
)
