import json

from compositor.object_set import save_object_set
from compositor.tests.factories import make_object_set


class TestPairScoreCommand:
    def test_pairs_then_scores(self, dataset, tmp_path, run_command):
        manifest_path, _ = dataset
        objects = tmp_path / 'objects'
        save_object_set(objects, make_object_set())
        pairs = run_command('pairs', '--manifest', manifest_path, '--objects', objects, '--cover', 1,
                            '--out', tmp_path / 'pairs')
        output = run_command('pair-score', '--pairs', pairs['pairs'], '--norm', 'l2', '--report', tmp_path / 'loss.json')
        assert output['status'] == 'success'
        assert output['norm'] == 'l2'
        assert len(output['pairs']) == 4
        assert output['mean_region_loss'] > 0
        assert json.loads((tmp_path / 'loss.json').read_text())['mean_region_loss'] == output['mean_region_loss']

    def test_missing_index(self, tmp_path, failing_command):
        code, report = failing_command('pair-score', '--pairs', tmp_path / 'pairs.json')
        assert code == 2
        assert report['error']['code'] == 'missing_file'
