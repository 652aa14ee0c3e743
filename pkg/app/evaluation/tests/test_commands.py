import json

from datasets.manifests import save_manifest
from datasets.models import Annotation, BBox

from evaluation.models import ELEVEN_POINT


def detections_file(manifest, path, dets):
    return save_manifest(path, type(manifest)(manifest.categories, manifest.images, tuple(dets)))


def scored_copy(manifest, path, score=1.0):
    return detections_file(manifest, path, [Annotation(a.image_id, a.bbox, score=score) for a in manifest.annotations])


class TestEvalCommand:
    def test_perfect_detections(self, dataset, tmp_path, run_command):
        manifest_path, manifest = dataset
        dets = scored_copy(manifest, tmp_path / 'dets.json')
        output = run_command('eval', '--gt', manifest_path, '--dets', dets, '--report', tmp_path / 'report.json')
        assert output['status'] == 'success'
        assert output['map50'] == 1.0
        assert set(output['per_category']) == set(manifest.categories)
        assert json.loads((tmp_path / 'report.json').read_text())['map50'] == 1.0

    def test_interpolation_flag(self, dataset, tmp_path, run_command):
        manifest_path, manifest = dataset
        dets = scored_copy(manifest, tmp_path / 'dets.json')
        output = run_command('eval', '--gt', manifest_path, '--dets', dets, '--interpolation', ELEVEN_POINT)
        assert output['interpolation'] == ELEVEN_POINT
        assert output['map50'] == 1.0

    def test_unscored_detections(self, dataset, failing_command):
        manifest_path, _ = dataset
        code, report = failing_command('eval', '--gt', manifest_path, '--dets', manifest_path)
        assert code == 2
        assert report['status'] == 'error'
        assert report['error']['code'] == 'manifest_format'

    def test_missing_file(self, dataset, tmp_path, failing_command):
        manifest_path, _ = dataset
        code, report = failing_command('eval', '--gt', manifest_path, '--dets', tmp_path / 'nope.json')
        assert code == 2
        assert report['error']['code'] == 'missing_file'

    def test_score_above_one(self, dataset, tmp_path, failing_command):
        manifest_path, manifest = dataset
        dets_path = scored_copy(manifest, tmp_path / 'dets.json', score=1.5)
        code, report = failing_command('eval', '--gt', manifest_path, '--dets', dets_path)
        assert code == 2
        assert report['error']['code'] == 'manifest_format'
        assert report['error']['annotation_index'] == 0

    def test_category_index_out_of_range(self, dataset, tmp_path, failing_command):
        manifest_path, manifest = dataset
        dets_path = detections_file(manifest, tmp_path / 'dets.json', [Annotation(1, BBox(4, 4, 8, 8, 7), score=0.9)])
        code, report = failing_command('eval', '--gt', manifest_path, '--dets', dets_path)
        assert code == 2
        assert report['error']['code'] == 'manifest_format'
        assert report['error']['category'] == 7

    def test_malformed_json(self, dataset, tmp_path, failing_command):
        manifest_path, _ = dataset
        broken = tmp_path / 'dets.json'
        broken.write_text('{"categories": [')
        code, report = failing_command('eval', '--gt', manifest_path, '--dets', broken)
        assert code == 2
        assert report['error']['code'] == 'manifest_format'
        assert report['error']['path'] == str(broken)
