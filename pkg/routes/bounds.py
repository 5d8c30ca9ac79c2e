# routes/bounds.py
from flask import jsonify, request
from flask.views import MethodView
from flask_smorest import Blueprint, abort

from experiments.reports import adversarial_report, bounds_table
from routes import load_args
from schemas import AdversarialQuerySchema, BoundsQuerySchema
from utils.errors import ScalenetError

blp = Blueprint("bounds", __name__, url_prefix="/api/bounds")


class BoundsTable(MethodView):
    """Closed-form bounds at one (n, gamma) point"""

    def get(self):
        args = load_args(BoundsQuerySchema(), request.args.to_dict())
        try:
            table = bounds_table(args["n"], args["gamma"], args["C"], args["D"], args["W"], args["b"])
        except ScalenetError as e:
            abort(400, message=str(e))
        return jsonify({"success": True, "bounds": table}), 200


class Adversarial(MethodView):
    """Dense interferer packing that defeats small (C, D)"""

    def get(self):
        args = load_args(AdversarialQuerySchema(), request.args.to_dict())
        if args["m"] > 100000:
            abort(400, message="m is capped at 100000 for the API")
        try:
            report = adversarial_report(args["C"], args["D"], args["alpha"], args["beta"], args["m"])
        except ScalenetError as e:
            abort(400, message=str(e))
        return jsonify({"success": True, "report": report}), 200


# Register views
blp.add_url_rule("/", view_func=BoundsTable.as_view("bounds_table"), methods=["GET"])
blp.add_url_rule("/adversarial", view_func=Adversarial.as_view("bounds_adversarial"), methods=["GET"])
