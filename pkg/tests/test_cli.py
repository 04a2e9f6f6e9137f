import csv
import json

import pytest

from iwapipe import cli
from iwapipe.errors import ConfigError
from iwapipe.harness import Scenario, harness

CONFIG = ['--p', '5', '--f', '1', '--M', '2']

def write_scenario(directory, **kwargs):
    data = dict(name='unit_oracle', config=dict(p=5, f=1, M=2, case='GL2', seed=0), checks=['padic.unit_oracle'])
    data.update(kwargs)
    path = directory / f"{data['name']}.json"
    path.write_text(json.dumps(data))
    return path

def one_shot(capsys, argv):
    assert cli.main(argv) == 0
    return json.loads(capsys.readouterr().out)

def test_unit_oracle_scenario(tmp_path):
    out = tmp_path / 'report.json'
    assert cli.main([str(write_scenario(tmp_path)), '-p', '1', '-o', str(out)]) == 0
    report = json.loads(out.read_text())
    assert report['status'] == 'pass'
    assert report['seed'] == 0
    (entry,) = report['checks']
    assert entry['id'] == 'padic.unit_oracle'
    assert entry['details']['digits_B0A0'] == [21, 6, 24]
    assert entry['details']['teichmuller_2'] == 7
    assert 'timings' not in report

def test_default_report_location(tmp_path):
    assert cli.main([str(write_scenario(tmp_path)), '-p', '1']) == 0
    assert (tmp_path / 'out' / 'unit_oracle.report.json').is_file()

def test_reports_are_deterministic(tmp_path):
    scenario = write_scenario(tmp_path, checks=['padic.unit_oracle', 'padic.teichmuller', 'group.round_trip'],
                              samples=10)
    first, second = tmp_path / 'first.json', tmp_path / 'second.json'
    assert cli.main([str(scenario), '-p', '1', '-o', str(first)]) == 0
    assert cli.main([str(scenario), '-p', '1', '-o', str(second)]) == 0
    assert first.read_bytes() == second.read_bytes()

def test_checks_with_nothing_tested_are_indeterminate(tmp_path):
    out = tmp_path / 'report.json'
    scenario = write_scenario(tmp_path, config=dict(p=5, f=1, M=2, N=1, case='GL2', seed=0), cutoff=8,
                              checks=['graded.subring_commutative'])
    assert cli.main([str(scenario), '-p', '1', '-o', str(out)]) == 1
    report = json.loads(out.read_text())
    assert report['status'] == 'indeterminate'
    assert report['checks'][0]['details']['pairs'] == 0

@pytest.mark.parametrize('f', [1, 2])
def test_frobenius_check(tmp_path, f):
    scenario = write_scenario(tmp_path, config=dict(p=5, f=f, M=2, case='QUAT', seed=0), checks=['padic.frobenius'],
                              samples=20)
    assert cli.main([str(scenario), '-p', '1']) == 0

def test_timings_and_csv(tmp_path):
    out, summary = tmp_path / 'report.json', tmp_path / 'summary.csv'
    assert cli.main([str(write_scenario(tmp_path)), '-p', '1', '-o', str(out), '--csv', str(summary), '--timings']) == 0
    assert 'padic.unit_oracle' in json.loads(out.read_text())['timings']
    with open(summary) as f:
        rows = list(csv.DictReader(f))
    assert rows[0]['id'] == 'padic.unit_oracle' and rows[0]['status'] == 'pass'

def test_check_ids_and_overrides(tmp_path):
    checks = [dict(check='group.round_trip', id='gl2'),
              dict(check='group.round_trip', id='quat', config=dict(case='QUAT'))]
    scenario = Scenario.from_file(write_scenario(tmp_path, name='cases', checks=checks, samples=5))
    assert [e.cfg.case.value for e in scenario.entries] == ['GL2', 'QUAT']
    assert harness(scenario, out=tmp_path / 'cases.json', processes=1).run() == 0

@pytest.mark.parametrize('changes', [
    dict(config=dict(p=5, f=1, M=2, N=2)),
    dict(config=dict(p=3, f=1, M=2)),
    dict(checks=['padic.nothing']),
    dict(checks=[]),
    dict(cutoff=25),
    dict(samples=0),
    dict(checks=['algebra.maxideals']),
    dict(checks=['group.subgroup_membership']),
    dict(inputs=dict(module='missing.json')),
    dict(params=dict(module='elsewhere'), checks=['module.relations']),
    dict(checks=['padic.unit_oracle', 'padic.unit_oracle']),
    dict(colour='blue'),
])
def test_invalid_scenarios_exit_with_two(tmp_path, changes):
    assert cli.main([str(write_scenario(tmp_path, **changes)), '-p', '1']) == 2

def test_scenario_errors_name_the_location(tmp_path):
    with pytest.raises(ConfigError, match=r'checks\[1\]\.cutoff'):
        Scenario.from_file(write_scenario(tmp_path, checks=['padic.unit_oracle', dict(check='algebra.maxideals', cutoff=30)]))

def test_missing_or_broken_scenario_files(tmp_path):
    assert cli.main([str(tmp_path / 'absent.json')]) == 2
    broken = tmp_path / 'broken.json'
    broken.write_text('{"name": ')
    assert cli.main([str(broken)]) == 2

def test_list(capsys):
    assert cli.main(['list']) == 0
    assert 'padic.unit_oracle' in capsys.readouterr().out

def test_decompose(capsys):
    assert one_shot(capsys, ['decompose', *CONFIG, '-w', ''])['digits'] == [0, 0, 0]
    result = one_shot(capsys, ['decompose', *CONFIG, '-w', 'B_0 A_0'])
    assert result['digits'] == [21, 6, 24]
    assert result['omega'] == '1/2'

def test_decompose_from_file(capsys, tmp_path):
    path = tmp_path / 'config.json'
    path.write_text(json.dumps(dict(p=5, f=1, M=2, case='QUAT')))
    assert one_shot(capsys, ['decompose', '--config', str(path), '-w', 'C_0'])['digits'] == [0, 0, 1]

def test_nu(capsys):
    assert one_shot(capsys, ['nu', *CONFIG, '-w', 'C_0', '--minus-one', '-T', '8']) == dict(cutoff=8, nu=2)
    assert one_shot(capsys, ['nu', *CONFIG, '-w', 'A_0', '-T', '8'])['nu'] == 0

def test_expand(capsys):
    result = one_shot(capsys, ['expand', *CONFIG, '-w', 'B_0', '--minus-one', '-T', '4'])
    assert result['cutoff'] == 4

def test_module_exponent(capsys):
    result = one_shot(capsys, ['module-exponent', *CONFIG])
    assert result['ell_min'] == 1
    assert result['ideal'] == 'c'

def test_one_shot_errors(capsys):
    assert cli.main(['decompose', *CONFIG, '--N', '2', '-w', 'A_0']) == 2
    assert cli.main(['decompose', *CONFIG, '-w', 'D_0']) == 1
    assert cli.main(['nu', *CONFIG, '-w', 'A_0', '-T', '25']) == 1
    with pytest.raises(SystemExit):
        cli.main(['nu', *CONFIG, '-w', 'A_0'])
