# app.py
from flask import Flask
from flask_smorest import Api
from flask_cors import CORS
import os
from dotenv import load_dotenv

from db import db
from routes.bounds import blp as bounds_blp
from routes.experiments import blp as experiments_blp


def create_app(config=None):
    # Load environment variables
    load_dotenv()

    # Create Flask app
    app = Flask(__name__)

    # Configuration
    app.config["PROPAGATE_EXCEPTIONS"] = True
    app.config["API_TITLE"] = "Scalenet Results API"
    app.config["API_VERSION"] = "v1"
    app.config["OPENAPI_VERSION"] = "3.0.3"
    app.config["OPENAPI_URL_PREFIX"] = "/"
    app.config["OPENAPI_SWAGGER_UI_PATH"] = "/swagger-ui"
    app.config["OPENAPI_SWAGGER_UI_URL"] = "https://cdn.jsdelivr.net/npm/swagger-ui-dist/"

    # Database configuration
    app.config["SQLALCHEMY_DATABASE_URI"] = os.getenv("DATABASE_URL", "sqlite:///scalenet.db")
    app.config["SQLALCHEMY_TRACK_MODIFICATIONS"] = False

    if config:
        app.config.update(config)

    # Initialize extensions
    db.init_app(app)
    api = Api(app)
    CORS(app)

    # Register blueprints (API routes)
    api.register_blueprint(experiments_blp)
    api.register_blueprint(bounds_blp)

    # Create tables
    with app.app_context():
        db.create_all()
        app.logger.info("Database tables ready")

    @app.route('/')
    def home():
        return {
            "message": "Scalenet Results API",
            "version": "1.0",
            "endpoints": {
                "experiments": "/api/experiments",
                "bounds": "/api/bounds",
                "docs": "/swagger-ui"
            }
        }

    return app


if __name__ == "__main__":
    app = create_app()
    app.run(debug=True, port=5000)
