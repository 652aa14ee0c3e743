"""
Forms for compositor run configuration.
"""
from typing import Any, Mapping, Optional, Tuple

from django import forms
from django.utils.translation import gettext_lazy as _

from core.forms import clean_block
from poisson.models import GUIDANCE_MODES

from .models import PlacementPolicy, SynthesisSpec


class PlacementPolicyForm(forms.Form):
    """Placement policy block."""

    vicinity_factor = forms.FloatField(required=False, min_value=0.0, initial=1.5)
    vicinity_radius = forms.FloatField(required=False, min_value=0.0, initial=None)
    max_iou = forms.FloatField(required=False, min_value=0.0, max_value=0.999999, initial=0.3)
    scale_min = forms.FloatField(required=False, initial=0.8)
    scale_max = forms.FloatField(required=False, initial=1.25)
    max_attempts = forms.IntegerField(required=False, min_value=1, initial=50)

    def clean(self):
        cleaned_data = super().clean()
        scale_min = cleaned_data.get('scale_min')
        scale_max = cleaned_data.get('scale_max')
        if scale_min is not None and scale_min <= 0:
            self.add_error('scale_min', _('Scale must be positive.'))
        if scale_min is not None and scale_max is not None and scale_min > scale_max:
            raise forms.ValidationError(_('scale_min must not exceed scale_max.'))
        for name in ('vicinity_factor', 'vicinity_radius'):
            if cleaned_data.get(name) == 0:
                self.add_error(name, _('Radius must be positive.'))
        return cleaned_data


class SynthesisSpecForm(forms.Form):
    """Synthesis spec block: per-image ranges, targets, guidance mode and rounds."""

    per_image = forms.JSONField(required=False, initial=dict)
    targets = forms.JSONField(required=False, initial=dict)
    mode = forms.ChoiceField(required=False, choices=[(m, m) for m in GUIDANCE_MODES], initial='source')
    max_rounds = forms.IntegerField(required=False, min_value=1, initial=4)

    def clean_per_image(self):
        value = self.cleaned_data.get('per_image') or {}
        if not isinstance(value, dict):
            raise forms.ValidationError(_('per_image must map categories to [min, max].'))
        for name, bounds in value.items():
            if not isinstance(bounds, (list, tuple)) or len(bounds) != 2:
                raise forms.ValidationError(_('Range for %(name)s must be [min, max].'), params={'name': name})
            lo, hi = bounds
            if not (isinstance(lo, int) and isinstance(hi, int)) or not 0 <= lo <= hi:
                raise forms.ValidationError(_('Range for %(name)s must satisfy 0 <= min <= max.'), params={'name': name})
        return value

    def clean_targets(self):
        value = self.cleaned_data.get('targets') or {}
        if not isinstance(value, dict):
            raise forms.ValidationError(_('targets must map categories to totals.'))
        for name, count in value.items():
            if not isinstance(count, int) or count < 0:
                raise forms.ValidationError(_('Target for %(name)s must be a non-negative integer.'), params={'name': name})
        return value


def parse_policy(data: Optional[Mapping[str, Any]]) -> PlacementPolicy:
    cleaned = clean_block(PlacementPolicyForm, data, 'policy')
    return PlacementPolicy(
        vicinity_factor=cleaned['vicinity_factor'],
        vicinity_radius=cleaned['vicinity_radius'],
        max_iou=cleaned['max_iou'],
        scale_range=(cleaned['scale_min'], cleaned['scale_max']),
        max_attempts=cleaned['max_attempts'],
    )


def parse_synthesis(data: Optional[Mapping[str, Any]]) -> SynthesisSpec:
    cleaned = clean_block(SynthesisSpecForm, data, 'synthesis')
    return SynthesisSpec(
        per_image={name: tuple(bounds) for name, bounds in (cleaned['per_image'] or {}).items()},
        targets=cleaned['targets'] or {},
        mode=cleaned['mode'] or 'source',
        max_rounds=cleaned['max_rounds'],
    )


def parse_generation_config(config: Mapping[str, Any]) -> Tuple[SynthesisSpec, PlacementPolicy]:
    """Split a run configuration into its synthesis and policy blocks."""
    return parse_synthesis(config.get('synthesis')), parse_policy(config.get('policy'))
