"""
Validation of run configuration blocks through Django forms.
"""
from typing import Any, Dict, Mapping, Optional, Type

from django import forms

from .exceptions import InvalidConfigError


def clean_block(form_class: Type[forms.Form], data: Optional[Mapping[str, Any]], block: str) -> Dict[str, Any]:
    """
    Validate one configuration block.

    Missing optional fields fall back to their ``initial`` value.

    Returns:
        Cleaned values

    Raises:
        InvalidConfigError: with every field error of the block
    """
    data = dict(data or {})
    form = form_class(data=data)
    if not form.is_valid():
        raise InvalidConfigError(
            f"Invalid '{block}' configuration",
            block=block,
            errors=form.errors.get_json_data(),
        )
    cleaned = {}
    for name, field in form.fields.items():
        value = form.cleaned_data.get(name)
        if value is None or (name not in data and value in ('', [], {})):
            value = field.initial() if callable(field.initial) else field.initial
        cleaned[name] = value
    return cleaned
