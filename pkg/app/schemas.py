import math

from marshmallow import (
    ValidationError,
    fields,
    post_load,
    pre_dump,
    validate,
    validates,
    validates_schema,
)

from app.environments import (
    DEFAULT_ANGLE_COUNT,
    DEFAULT_ATOL,
    DEFAULT_CONTOUR_NODES,
    DEFAULT_DIMS,
    DEFAULT_RTOL,
    DEFAULT_SEED,
    DEFAULT_SPECTRUM_RADIUS,
    DEFAULT_TRIALS,
    DEFAULT_WORKERS,
)
from app.exceptions import LabError
from app.extensions import ma
from app.lab.harness import REPORT_FORMATS, SUITES, SuiteConfig, norm_dict
from app.lab.herglotz import HerglotzFunction
from app.lab.matcore import CMatrix
from app.lab.reports import NormKind

# Fields of SuiteConfig that describe how a run is executed or written
# rather than what it computes; they stay out of the report echo.
RUN_ONLY_FIELDS = ('workers', 'timing', 'output_path', 'report_format')


class ComplexField(fields.Field):
    """Complex number as [re, im]."""

    def _serialize(self, value, attr, obj, **kwargs):
        if value is None:
            return None
        value = complex(value)
        return [value.real, value.imag]

    def _deserialize(self, value, attr, data, **kwargs):
        if not isinstance(value, (list, tuple)) or len(value) != 2:
            raise ValidationError('Complex numbers are [re, im] pairs')
        try:
            re, im = float(value[0]), float(value[1])
        except (TypeError, ValueError) as e:
            raise ValidationError('Complex parts must be numbers') from e
        if not (math.isfinite(re) and math.isfinite(im)):
            raise ValidationError('Complex parts must be finite')
        return complex(re, im)


# Matrices
class MatrixSchema(ma.Schema):
    rows = fields.Integer(required=True, validate=validate.Range(min=0))
    cols = fields.Integer(required=True, validate=validate.Range(min=0))
    entries = fields.List(ComplexField(), required=True)

    @validates_schema
    def validate_size(self, data, **kwargs):
        expected = data['rows'] * data['cols']
        if len(data['entries']) != expected:
            raise ValidationError(
                f'Expected {expected} entries, got {len(data["entries"])}',
                'entries',
            )

    @pre_dump
    def from_matrix(self, matrix: CMatrix, **kwargs):
        return {
            'rows': matrix.rows,
            'cols': matrix.cols,
            'entries': matrix.entries,
        }

    @post_load
    def make_matrix(self, data, **kwargs) -> CMatrix:
        return CMatrix.from_entries(data['rows'], data['cols'], data['entries'])


# Herglotz functions
class HerglotzSchema(ma.Schema):
    atoms = fields.List(fields.Float(), required=True)
    weights = fields.List(fields.Float(), required=True)

    @post_load
    def make_function(self, data, **kwargs) -> HerglotzFunction:
        try:
            return HerglotzFunction(tuple(data['atoms']), tuple(data['weights']))
        except LabError as e:
            raise ValidationError(str(e)) from e


# Norm kinds
class NormKindSchema(ma.Schema):
    tag = fields.String(required=True, validate=validate.OneOf(NormKind.TAGS))
    p = fields.Float(allow_nan=True, load_default=None)
    k = fields.Integer(load_default=None)

    @post_load
    def make_kind(self, data, **kwargs) -> NormKind:
        try:
            return NormKind(data['tag'], data.get('p'), data.get('k'))
        except ValueError as e:
            raise ValidationError(str(e)) from e


# Inequality reports
class IneqReportSchema(ma.Schema):
    name = fields.String(dump_only=True)
    norm = fields.Function(norm_dict, dump_only=True)
    lhs = fields.Float(dump_only=True)
    rhs = fields.Float(dump_only=True)
    slack = fields.Float(dump_only=True)
    holds = fields.Boolean(dump_only=True)
    params = fields.Dict(dump_only=True)


# Suites
class SuiteConfigSchema(ma.Schema):
    trials = fields.Integer(
        load_default=DEFAULT_TRIALS, validate=validate.Range(min=1)
    )
    dims = fields.List(
        fields.Integer(validate=validate.Range(min=1)),
        load_default=lambda: list(DEFAULT_DIMS),
        validate=validate.Length(min=1),
    )
    seed = fields.Integer(
        load_default=DEFAULT_SEED,
        validate=validate.Range(min=0, max=2**64 - 1),
    )
    spectrum_radius = fields.Float(
        load_default=DEFAULT_SPECTRUM_RADIUS,
        validate=validate.Range(
            min=0, max=1, min_inclusive=False, max_inclusive=False
        ),
    )
    atol = fields.Float(
        load_default=DEFAULT_ATOL, validate=validate.Range(min=0)
    )
    rtol = fields.Float(
        load_default=DEFAULT_RTOL, validate=validate.Range(min=0)
    )
    suites = fields.List(fields.String(), load_default=lambda: ['all'])
    contour_nodes = fields.Integer(
        load_default=DEFAULT_CONTOUR_NODES, validate=validate.Range(min=1)
    )
    angle_count = fields.Integer(
        load_default=DEFAULT_ANGLE_COUNT, validate=validate.Range(min=1)
    )
    report_format = fields.String(
        load_default='json', validate=validate.OneOf(REPORT_FORMATS)
    )
    output_path = fields.String(load_default=None, allow_none=True)
    workers = fields.Integer(
        load_default=DEFAULT_WORKERS, validate=validate.Range(min=1)
    )
    timing = fields.Boolean(load_default=False)

    @validates('suites')
    def validate_suites(self, suites, **kwargs):
        unknown = [s for s in suites if s != 'all' and s not in SUITES]
        if not suites or unknown:
            raise ValidationError(f'Unknown suites: {unknown or "none given"}')

    @post_load
    def make_config(self, data, **kwargs) -> SuiteConfig:
        try:
            return SuiteConfig(**data)
        except LabError as e:
            raise ValidationError(str(e)) from e


class SuiteRowSchema(ma.Schema):
    name = fields.String()
    suite = fields.String()
    variant = fields.String()
    mode = fields.String()
    check = fields.String()
    norm = fields.String()
    trials = fields.Integer()
    violations = fields.Integer()
    min_slack = fields.Float()
    mean_slack = fields.Float()
    equality_witnesses = fields.Integer()
    worst = fields.Dict(allow_none=True)


class WitnessResultSchema(ma.Schema):
    suite = fields.String()
    witness = fields.String()
    variant = fields.String()
    mode = fields.String()
    norm_label = fields.Function(lambda result: result.report.norm_label)
    report = fields.Nested(IneqReportSchema)


class SuiteReportSchema(ma.Schema):
    config = fields.Nested(SuiteConfigSchema(exclude=RUN_ONLY_FIELDS))
    rows = fields.List(fields.Nested(SuiteRowSchema))
    witnesses = fields.List(fields.Nested(WitnessResultSchema))
    summary = fields.Method('get_summary')
    wall_time = fields.Float()

    def get_summary(self, report) -> dict:
        return {
            'rows': len(report.rows),
            'theorem_violations': report.theorem_violations,
            'recording_violations': report.recording_violations,
        }
