import logging

from flask import Blueprint, current_app, request
from marshmallow import ValidationError, fields, validate

from app.lab.harness import list_suites, replay, report_data, run_suite
from app.schemas import IneqReportSchema, SuiteConfigSchema

logger = logging.getLogger(__name__)
blueprint = Blueprint('suites', __name__, url_prefix='/suites')


def _check(validator, value, field: str):
    """Run a marshmallow validator under the request's field name."""
    try:
        validator(value)
    except ValidationError as e:
        raise ValidationError(e.messages, field) from e


@blueprint.get('/')
def get_suites():
    return {'suites': list_suites()}, 200


@blueprint.post('/run/')
def run():
    config = SuiteConfigSchema().load(request.json or {})
    limits = current_app.config
    _check(validate.Range(max=limits['API_MAX_TRIALS']), config.trials, 'trials')
    _check(validate.Range(max=limits['API_MAX_DIM']), max(config.dims), 'dims')
    # no worker pools inside a request
    _check(
        validate.Equal(1, error='Worker pools are not available over HTTP'),
        config.workers,
        'workers',
    )

    report = run_suite(config)
    return report_data(report), 200


@blueprint.post('/replay/')
def replay_instance():
    params = request.json
    if not isinstance(params, dict):
        raise ValidationError('Replay body must be a JSON object')
    if 'dim' in params:
        dim = fields.Integer().deserialize(params['dim'], 'dim', params)
        limit = current_app.config['API_MAX_DIM']
        _check(validate.Range(min=1, max=limit), dim, 'dim')
    return IneqReportSchema().dump(replay(params)), 200
