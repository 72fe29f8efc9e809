from setuptools import setup, find_namespace_packages

setup(
    name='cochainlab',

    packages=find_namespace_packages(include=['cochainlab', 'cochainlab.*']),

    include_package_data=True,

    version='0.1.0',

    description='Spectral and coboundary expansion of random simplicial complexes',

    install_requires=['numpy>=1.22', 'scipy>=1.8', 'networkx>=2.6'],

    entry_points={
        'console_scripts': ['cochainlab=cochainlab.harness.runner:main'],
    },

    python_requires='>=3.10',

    classifiers=[
        'Natural Language :: English',
        'Operating System :: OS Independent',
        'Programming Language :: Python :: 3',
        'Topic :: Scientific/Engineering :: Mathematics',
    ]
)
