import logging

from app import AppContext
from app.environments import LOG_LEVEL, DevelopmentConfig

logging.basicConfig(level=LOG_LEVEL.upper())
app = AppContext().get_app()

if __name__ == '__main__':
    app.config.from_object(DevelopmentConfig)
    app.run(host='127.0.0.1', port=8000)
