import logging

import numpy as np
from flask import Blueprint, request
from marshmallow import fields

from app.extensions import ma
from app.lab.herglotz import HerglotzFunction
from app.schemas import ComplexField, HerglotzSchema

logger = logging.getLogger(__name__)
blueprint = Blueprint('herglotz', __name__, url_prefix='/herglotz')


class EvaluateRequestSchema(ma.Schema):
    function = fields.Nested(HerglotzSchema, required=True)
    points = fields.List(ComplexField(), required=True)


class EvaluateResponseSchema(ma.Schema):
    values = fields.List(ComplexField())
    conjugate_values = fields.List(ComplexField())


@blueprint.post('/evaluate/')
def evaluate():
    data = EvaluateRequestSchema().load(request.json)
    f: HerglotzFunction = data['function']
    values = f(np.array(data['points'], dtype=np.complex128))

    return EvaluateResponseSchema().dump(
        {
            'values': list(values),
            'conjugate_values': list(np.conj(values)),
        }
    ), 200
