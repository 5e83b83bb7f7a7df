# -*- coding: utf-8 -*-
"""
Status and error messages for airsec
"""


# configuration
n_not_integral = 'N must be integral (T={T} / alpha={alpha} = {n})'
unknown_key = 'unknown configuration key'
bad_number = 'expected a number, got {value!r}'
bad_integer = 'expected an integer, got {value!r}'
bad_vector = 'expected three comma separated numbers x,y,z, got {value!r}'
bad_choice = 'expected one of {choices}, got {value!r}'
not_positive = 'must be positive, got {value}'
negative = 'must be nonnegative, got {value}'
not_square = ('K must be a perfect square unless Kx and Ky are given, '
              'got {value}')
spacing_range = 'element spacing must lie in (0, 0.5) wavelengths, got {value}'
lemma1_exceeded = ('K={k} exceeds Lemma-1 limit {limit} (Kx <= {kx_max}, '
                   'Ky <= {ky_max}); reflections may be mismatched')
bad_manifest = 'manifest has no scenario object'
bad_override = 'expected KEY=VALUE, got {value!r}'
bad_values = 'expected comma separated numbers, got {value!r}'
scenario_summary = ('Scenario: M={m}, K={k} ({kx}x{ky}), N={n}, '
                    'scheme={scheme}, channel={channel}, eve={eve}, '
                    'seed={seed}, trials={trials}')

# planner
hover_no_ring = 'step {n}: no feasible ring, hovering at {pos}'
hover_site = 'hover site {pos}, objective {value:.6g}'
approach_step = 'step {n}: no ring point in reach, moved {dist:.3f} m'

# simulation
trial_done = 'trial {trial} done: mean secrecy {rate:.6g} bits'
trials_started = 'running {trials} trials on {workers} worker thread(s)'
bad_threads = 'expected a positive integer thread count, got {value!r}'
few_trials = ('normal-approximation interval from only {trials} trials '
              '(at least {min_trials} recommended)')
sweep_value = 'sweep {param}={value}: mean {mean:.6g} bits'
unknown_param = 'unknown sweep parameter, expected one of {choices}'
no_values = 'sweep needs at least one value'

# cli and outputs
wrote_file = 'Wrote {filename}'
cannot_read = 'Cannot read {filename}: {err}'
cannot_write = 'Cannot write {filename}: {err}'
error_exit = 'airsec: error: {err}'
check_passed = 'PASS {name}: {detail}'
check_failed = 'FAIL {name}: {detail}'
check_crashed = 'crashed with {kind}: {err}'
run_result = ('mean secrecy {mean:.6g} bits/s/Hz, 95% interval '
              '[{low:.6g}, {high:.6g}] over {trials} trials')
validate_summary = '{passed}/{total} invariant suites passed'
unhandled_exception = ('Terminated by an unhandled error, traceback written '
                       'to {filename}\n')
