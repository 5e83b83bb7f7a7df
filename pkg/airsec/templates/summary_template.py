# -*- coding: utf-8 -*-
"""
Template for the text summary.

This is called by exec() and works by modifying an existing variable
called 'report' (instance of Report class)

The idea is to avoid putting the template code inside a function
call, which would lead to messy indentation. A block is dropped when
all of its fields are at their default.
"""

report += """AIRSEC SUMMARY

Command: {command}
{scenario}
IRS plate: {plate_width} wavelengths wide, {plate_area} square wavelengths
"""

report += """
Lemma-1 limit exceeded: at most {lemma1_kx} x {lemma1_ky} = {lemma1_limit} elements fit the plate
"""

report += """
SECRECY
Trials: {trials}
Mean secrecy rate: {mean} bits/s/Hz
Mean unclamped rate difference: {mean_raw} bits/s/Hz
Mean rate at Bob / Eve: {rate_bob} / {rate_eve} bits/s/Hz
"""
report += '95% interval: {ci_low} ... {ci_high} bits/s/Hz\n'

report += """
FLIGHT
Terminal hover point: ({hover_x}, {hover_y}, {hover_z})
Distance from the hover point to Eve: {hover_eve} m
Largest step: {max_step} m
"""

report += """
FIXED IRS BASELINE
Mean secrecy rate: {fixed_mean} bits/s/Hz
Gain of the mobile IRS: {fixed_gain} bits/s/Hz
"""

report += """
SWEEP
Parameter: {sweep_param}
Values: {sweep_values}
Best value: {sweep_best}
"""

report += """
VALIDATION
Suites passed: {checks_passed} / {checks_total}
"""
