# -*- coding: utf-8 -*-
"""
Build script for airsec
"""

from setuptools import setup, find_packages


setup(name='airsec',
      version='0.1',
      description='Secrecy simulator for a UAV-carried reflecting surface '
                  'serving a ground sensor field',
      license='GPLv3',
      packages=find_packages(exclude=['examples', 'examples.*']),
      python_requires='>=3.9',
      install_requires=['numpy', 'scipy', 'pandas', 'openpyxl'],
      extras_require={'plot': ['matplotlib'],
                      'test': ['pytest', 'flake8']},
      entry_points={
              'console_scripts': ['airsec=airsec.cli:main']
              },
      package_data={'airsec': ['templates/*.py']},
      include_package_data=True,
      )
