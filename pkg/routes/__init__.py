# routes/__init__.py
from flask_smorest import abort
from marshmallow import ValidationError


def load_args(schema, data):
    try:
        return schema.load(data)
    except ValidationError as e:
        abort(400, message=f"Invalid parameters: {e.messages}")
