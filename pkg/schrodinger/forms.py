from django import forms


def _parse_floats(text):
    return [float(part) for part in str(text).replace(' ', '').split(',') if part]


class RunOptionsForm(forms.Form):
    """
    Validates the merged flag/config/default options of one cgolab run.
    ``flag_errors()`` reports every problem prefixed with the offending flag.
    """
    grid = forms.IntegerField(min_value=4)
    pad = forms.IntegerField(min_value=1)
    n = forms.CharField(required=False)
    z0 = forms.CharField(required=False)
    potential = forms.CharField()
    q2 = forms.CharField(required=False)
    p = forms.FloatField()
    tol = forms.FloatField()
    out = forms.CharField()
    seed = forms.IntegerField(min_value=0)
    workers = forms.IntegerField(min_value=1)
    boundary_nodes = forms.IntegerField(min_value=16)
    plots = forms.BooleanField(required=False)

    def clean_grid(self):
        grid = self.cleaned_data['grid']
        if grid % 2:
            raise forms.ValidationError('grid size must be even')
        return grid

    def clean_n(self):
        text = self.cleaned_data['n']
        if not text:
            return []
        try:
            values = _parse_floats(text)
        except ValueError:
            raise forms.ValidationError('expected a comma-separated list of numbers')
        if any(v <= 0 for v in values):
            raise forms.ValidationError('frequencies must be > 0')
        if any(b <= a for a, b in zip(values, values[1:])):
            raise forms.ValidationError('frequencies must be increasing')
        return values

    def clean_z0(self):
        text = self.cleaned_data['z0']
        if not text:
            return None
        try:
            parts = _parse_floats(text)
        except ValueError:
            raise forms.ValidationError('expected re,im')
        if len(parts) != 2:
            raise forms.ValidationError('expected re,im')
        z0 = complex(parts[0], parts[1])
        if abs(z0) >= 1:
            raise forms.ValidationError('centre must lie inside the unit disc')
        return z0

    def clean_p(self):
        p = self.cleaned_data['p']
        if p <= 2:
            raise forms.ValidationError('exponent must be > 2')
        return p

    def clean_tol(self):
        tol = self.cleaned_data['tol']
        if tol <= 0:
            raise forms.ValidationError('tolerance must be > 0')
        return tol

    def flag_errors(self):
        messages = []
        for name, errors in self.errors.items():
            flag = '--' + name.replace('_', '-')
            messages.extend(f'{flag}: {error}' for error in errors)
        return messages
