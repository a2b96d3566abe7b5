from setuptools import Extension, setup

# The C kernel is a speed path only; the package falls back to pure Python
# when the build is unavailable, so failures here must not abort the install.
setup(
    ext_modules=[
        Extension(
            "ivhslab._rowred",
            sources=["src/ivhslab/_rowred.c"],
            optional=True,
            extra_compile_args=["-O2"],
        )
    ]
)
