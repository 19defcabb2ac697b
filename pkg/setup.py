from setuptools import setup

setup(
    data_files=[
        ("config", ["config/killing-fields.yaml"]),
        ("data", ["data/printed-coefficients.yaml"]),
    ]
)
