# routes/experiments.py
import math
import os

from flask import current_app, jsonify, request
from flask.views import MethodView
from flask_smorest import Blueprint, abort

from db import db
from experiments.io import read_csv
from experiments.runner import parse_record, summarize
from models import ExperimentRecordRow, SweepRun
from routes import load_args
from schemas import ImportSchema, RecordQuerySchema

blp = Blueprint("experiments", __name__, url_prefix="/api/experiments")


def _finite(value):
    return value if value is not None and math.isfinite(value) else None


def import_sweep_csv(filename):
    """Load a sweep CSV into a new run; rows that do not parse are reported, not stored."""
    run = SweepRun(source=os.path.abspath(filename))
    db.session.add(run)
    errors = []
    imported = 0
    for line, row in enumerate(read_csv(filename), start=2):
        try:
            record = parse_record(row)
        except (TypeError, ValueError) as e:
            errors.append(f"line {line}: {e}")
            continue
        run.records.append(ExperimentRecordRow(
            gamma=record.gamma,
            n=record.n,
            trial=record.trial,
            seed=str(record.seed),
            feasible=record.feasible,
            L=_finite(record.L),
            S=record.S,
            M=record.M,
            p=_finite(record.p),
            lam=record.lam,
            dc_success=record.dc_success,
            sinr_success=record.sinr_success,
            min_slot_sinr=_finite(record.min_slot_sinr),
            max_hop_length=record.max_hop_length,
            load_bound=_finite(record.load_bound),
            txset_bound=_finite(record.txset_bound),
            throughput_floor=_finite(record.throughput_floor),
            wall_time=record.wall_time,
            error=record.error[:500],
        ))
        imported += 1
    run.record_count = imported
    db.session.commit()
    return run, errors


def _filtered_records():
    args = load_args(RecordQuerySchema(), request.args.to_dict())
    query = ExperimentRecordRow.query.filter_by(**args)
    return query.order_by(ExperimentRecordRow.run_id, ExperimentRecordRow.gamma,
                          ExperimentRecordRow.n, ExperimentRecordRow.trial).all()


class ExperimentsList(MethodView):
    """Stored trial records"""

    def get(self):
        """List records, optionally filtered by gamma, n and run_id"""
        records = _filtered_records()
        return jsonify({
            "success": True,
            "count": len(records),
            "records": [record.to_dict() for record in records]
        }), 200


class ExperimentsImport(MethodView):
    """Import a sweep CSV into the results store"""

    def post(self):
        filename = load_args(ImportSchema(), request.get_json(silent=True) or {})["filename"]

        if not os.path.exists(filename):
            abort(404, message=f"CSV file '{filename}' not found")

        try:
            run, errors = import_sweep_csv(filename)
        except Exception as e:
            db.session.rollback()
            current_app.logger.exception("sweep import failed")
            abort(500, message=f"Error importing CSV: {str(e)}")

        return jsonify({
            "success": True,
            "message": "CSV imported successfully",
            "run": run.to_dict(),
            "errors": errors if errors else None
        }), 200


class ExperimentsSummary(MethodView):
    """Per-(gamma, n) summary of stored records"""

    def get(self):
        records = _filtered_records()
        if not records:
            abort(404, message="No stored records match the query")
        summary = summarize([parse_record(record.to_dict()) for record in records])
        return jsonify({"success": True, **summary}), 200


class RunsList(MethodView):
    def get(self):
        runs = SweepRun.query.order_by(SweepRun.id).all()
        return jsonify({"success": True, "runs": [run.to_dict() for run in runs]}), 200


# Register views
blp.add_url_rule("/", view_func=ExperimentsList.as_view("experiments_list"), methods=["GET"])
blp.add_url_rule("/import", view_func=ExperimentsImport.as_view("experiments_import"), methods=["POST"])
blp.add_url_rule("/summary", view_func=ExperimentsSummary.as_view("experiments_summary"), methods=["GET"])
blp.add_url_rule("/runs", view_func=RunsList.as_view("experiments_runs"), methods=["GET"])
