import logging

from flask import Blueprint
from marshmallow import ValidationError
from werkzeug.exceptions import HTTPException

from app.exceptions import LabError

from .herglotz import blueprint as herglotz_blueprint
from .norms import blueprint as norms_blueprint
from .suites import blueprint as suites_blueprint

logger = logging.getLogger(__name__)
blueprint = Blueprint('api', __name__, url_prefix='/api')

# Register the blueprints
blueprint.register_blueprint(norms_blueprint)
blueprint.register_blueprint(suites_blueprint)
blueprint.register_blueprint(herglotz_blueprint)


def validation_handler(error: ValidationError):
    return {'error': error.messages}, 400


def http_handler(error: HTTPException):
    return {'error': error.description}, error.code


def lab_error_handler(error: LabError):
    logger.warning(f'{type(error).__name__}: {error}')
    return {'error': str(error), 'type': type(error).__name__}, 422


def exception_handler(error):
    error_message = str(error)
    logger.error(f'Exception occurred: {error_message}')
    return {'error': error_message}, 500


blueprint.register_error_handler(ValidationError, validation_handler)
blueprint.register_error_handler(LabError, lab_error_handler)
blueprint.register_error_handler(HTTPException, http_handler)
blueprint.register_error_handler(Exception, exception_handler)
