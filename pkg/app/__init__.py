from flask import Flask

from . import extensions as exts
from .api import blueprint
from .environments import Config


def create_app(config=Config) -> Flask:
    app = Flask(__name__)
    app.config.from_object(config)

    # Init extensions
    exts.ma.init_app(app)
    exts.cors.init_app(app)

    # Register blueprints
    app.register_blueprint(blueprint)
    return app


class AppContext:
    instance = None

    def init(self):
        self.app = create_app()

    def __new__(cls):
        if not cls.instance:
            cls.instance = super(AppContext, cls).__new__(cls)
            cls.instance.init()

        return cls.instance

    def get_app(self) -> Flask:
        return self.app
