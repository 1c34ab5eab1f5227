from setuptools import setup, find_packages

install_requires = ['numpy',
                    'scipy',
                    'pandas',
                    'scikit-learn',
                    ]

setup(name='blowuplab',
      version='1.0.0',
      description='generalized self-similar blow-up profiles of u_tt - u_xx = (u_x)^2 and their stability',
      url='',
      author='blowuplab developers',
      author_email='',
      license='',
      packages=find_packages(exclude=['utests', 'docs']),
      install_requires=install_requires,
      python_requires='>=3.8',
      entry_points={'console_scripts': ['blowuplab = blowuplab.cli:main']},
      zip_safe=False,
      )
