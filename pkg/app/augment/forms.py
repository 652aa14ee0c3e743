"""
Forms for augmentation run configuration.
"""
from typing import Any, Mapping, Optional

from django import forms
from django.utils.translation import gettext_lazy as _

from core.forms import clean_block

from .models import METHODS, AugmentSpec, BaselineParams


def _pair(form: forms.Form, name: str, lo: str, hi: str):
    low, high = form.cleaned_data.get(lo), form.cleaned_data.get(hi)
    if low is not None and high is not None and low > high:
        form.add_error(hi, _('%(name)s maximum must not be below its minimum.') % {'name': name})


class BaselineForm(forms.Form):
    """Baseline block: flip, scale, crop and channel means."""

    flip_prob = forms.FloatField(required=False, min_value=0.0, max_value=1.0, initial=0.5)
    scale_min = forms.FloatField(required=False, min_value=0.01, initial=0.6)
    scale_max = forms.FloatField(required=False, min_value=0.01, initial=1.3)
    crop_height = forms.IntegerField(required=False, min_value=1, initial=None)
    crop_width = forms.IntegerField(required=False, min_value=1, initial=None)
    min_box_fraction = forms.FloatField(required=False, min_value=0.0, max_value=1.0, initial=0.25)
    means = forms.JSONField(required=False, initial=lambda: [0.0, 0.0, 0.0])

    def clean_means(self):
        value = self.cleaned_data.get('means')
        if value in (None, ''):
            return None
        if not isinstance(value, list) or not all(isinstance(v, (int, float)) for v in value):
            raise forms.ValidationError(_('means must be a list of numbers.'))
        return value

    def clean(self):
        cleaned_data = super().clean()
        _pair(self, 'scale', 'scale_min', 'scale_max')
        if (cleaned_data.get('crop_height') is None) != (cleaned_data.get('crop_width') is None):
            raise forms.ValidationError(_('crop_height and crop_width go together.'))
        return cleaned_data


class AugmentSpecForm(forms.Form):
    """Augmentation block: method and its parameters."""

    method = forms.ChoiceField(required=False, choices=[(m, m) for m in METHODS], initial='baseline')
    cutout_size = forms.IntegerField(required=False, min_value=1, initial=None)
    erase_area_min = forms.FloatField(required=False, min_value=0.0001, max_value=1.0, initial=0.02)
    erase_area_max = forms.FloatField(required=False, min_value=0.0001, max_value=1.0, initial=0.4)
    erase_aspect_min = forms.FloatField(required=False, min_value=0.0001, initial=0.3)
    erase_aspect_max = forms.FloatField(required=False, min_value=0.0001, initial=1 / 0.3)
    erase_attempts = forms.IntegerField(required=False, min_value=1, initial=100)
    grid_unit_min = forms.IntegerField(required=False, min_value=1, initial=16)
    grid_unit_max = forms.IntegerField(required=False, min_value=1, initial=64)
    grid_ratio = forms.FloatField(required=False, min_value=0.0, max_value=0.999999, initial=0.4)
    has_grid = forms.IntegerField(required=False, min_value=1, initial=4)
    has_prob = forms.FloatField(required=False, min_value=0.0, max_value=1.0, initial=0.5)
    mixup_alpha = forms.FloatField(required=False, min_value=0.0001, initial=1.5)

    def clean(self):
        cleaned_data = super().clean()
        _pair(self, 'erase_area', 'erase_area_min', 'erase_area_max')
        _pair(self, 'erase_aspect', 'erase_aspect_min', 'erase_aspect_max')
        _pair(self, 'grid_unit', 'grid_unit_min', 'grid_unit_max')
        return cleaned_data


def parse_baseline(data: Optional[Mapping[str, Any]]) -> BaselineParams:
    cleaned = clean_block(BaselineForm, data, 'baseline')
    crop_size = None
    if cleaned['crop_height'] is not None:
        crop_size = (cleaned['crop_height'], cleaned['crop_width'])
    return BaselineParams(
        flip_prob=cleaned['flip_prob'],
        scale_range=(cleaned['scale_min'], cleaned['scale_max']),
        crop_size=crop_size,
        min_box_fraction=cleaned['min_box_fraction'],
        means=tuple(cleaned['means']),
    )


def parse_augment_config(config: Optional[Mapping[str, Any]], method: Optional[str] = None) -> AugmentSpec:
    """
    Build an AugmentSpec from the ``augment`` and ``baseline`` blocks of a run configuration.

    An explicit ``method`` overrides the configured one.
    """
    config = dict(config or {})
    block = dict(config.get('augment') or {})
    if method:
        block['method'] = method
    cleaned = clean_block(AugmentSpecForm, block, 'augment')
    return AugmentSpec(
        method=cleaned['method'] or 'baseline',
        cutout_size=cleaned['cutout_size'],
        erase_area=(cleaned['erase_area_min'], cleaned['erase_area_max']),
        erase_aspect=(cleaned['erase_aspect_min'], cleaned['erase_aspect_max']),
        erase_attempts=cleaned['erase_attempts'],
        grid_unit=(cleaned['grid_unit_min'], cleaned['grid_unit_max']),
        grid_ratio=cleaned['grid_ratio'],
        has_grid=cleaned['has_grid'],
        has_prob=cleaned['has_prob'],
        mixup_alpha=cleaned['mixup_alpha'],
        baseline=parse_baseline(config.get('baseline')),
    )
