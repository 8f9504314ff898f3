import logging

from flask import Blueprint, request
from marshmallow import ValidationError, fields, validates

from app.extensions import ma
from app.lab.matcore import classify
from app.lab.norms import audit_grid, norm_from_singular_values
from app.lab.spectral import singular_values
from app.schemas import MatrixSchema, NormKindSchema

logger = logging.getLogger(__name__)
blueprint = Blueprint('norms', __name__, url_prefix='/norms')


class NormRequestSchema(ma.Schema):
    matrix = fields.Nested(MatrixSchema, required=True)
    norms = fields.Raw(load_default='all')

    @validates('norms')
    def validate_norms(self, norms, **kwargs):
        if norms != 'all' and not isinstance(norms, list):
            raise ValidationError("norms must be 'all' or a list of kinds")
        return norms


class NormResponseSchema(ma.Schema):
    norms = fields.Dict(keys=fields.String(), values=fields.Float())
    classification = fields.Dict(allow_none=True)
    singular_values = fields.List(fields.Float())


@blueprint.post('/')
def evaluate_norms():
    data = NormRequestSchema().load(request.json)
    matrix = data['matrix']
    if data['norms'] == 'all':
        kinds = audit_grid(min(matrix.shape))
    else:
        kinds = NormKindSchema(many=True).load(data['norms'])

    values = singular_values(matrix)
    classification = None
    if matrix.is_square and matrix.rows:
        flags = classify(matrix)
        classification = {
            'hermitian': flags.hermitian,
            'normal': flags.normal,
            'unitary': flags.unitary,
            'contraction': flags.contraction,
        }

    logger.info(f'Evaluated {len(kinds)} norms of a {matrix.shape} matrix')
    return NormResponseSchema().dump(
        {
            'norms': {
                kind.label: norm_from_singular_values(values, kind)
                for kind in kinds
            },
            'classification': classification,
            'singular_values': [float(s) for s in values],
        }
    ), 200
