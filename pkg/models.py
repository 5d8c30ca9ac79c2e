# models.py
from db import db
from datetime import datetime


class SweepRun(db.Model):
    """One imported sweep CSV"""
    __tablename__ = "sweep_runs"

    id = db.Column(db.Integer, primary_key=True)
    source = db.Column(db.String(500), nullable=False)
    record_count = db.Column(db.Integer, default=0)
    imported_at = db.Column(db.DateTime, default=datetime.utcnow)

    records = db.relationship("ExperimentRecordRow", backref="run", lazy=True, cascade="all, delete-orphan")

    def to_dict(self):
        return {
            'id': self.id,
            'source': self.source,
            'record_count': self.record_count,
            'imported_at': self.imported_at.isoformat() if self.imported_at else None,
        }

    def __repr__(self):
        return f"<SweepRun {self.id}: {self.source}>"


class ExperimentRecordRow(db.Model):
    """One trial of a sweep"""
    __tablename__ = "experiment_records"

    id = db.Column(db.Integer, primary_key=True)
    run_id = db.Column(db.Integer, db.ForeignKey("sweep_runs.id"), nullable=False)
    gamma = db.Column(db.Float, nullable=False)
    n = db.Column(db.Integer, nullable=False)
    trial = db.Column(db.Integer, nullable=False)
    seed = db.Column(db.String(30), nullable=False)  # uint64 does not fit a signed column
    feasible = db.Column(db.Boolean, default=False)
    L = db.Column(db.Float, nullable=True)  # NULL when infeasible
    S = db.Column(db.Integer, default=0)
    M = db.Column(db.Integer, default=0)
    p = db.Column(db.Float, nullable=True)
    lam = db.Column(db.Float, default=0.0)
    dc_success = db.Column(db.Boolean, default=False)
    sinr_success = db.Column(db.Boolean, default=False)
    min_slot_sinr = db.Column(db.Float, nullable=True)
    max_hop_length = db.Column(db.Float, default=0.0)
    load_bound = db.Column(db.Float, nullable=True)
    txset_bound = db.Column(db.Float, nullable=True)
    throughput_floor = db.Column(db.Float, nullable=True)
    wall_time = db.Column(db.Float, nullable=True)
    error = db.Column(db.String(500), default="")

    def to_dict(self):
        return {
            'id': self.id,
            'run_id': self.run_id,
            'gamma': self.gamma,
            'n': self.n,
            'trial': self.trial,
            'seed': self.seed,
            'feasible': self.feasible,
            'L': self.L,
            'S': self.S,
            'M': self.M,
            'p': self.p,
            'lam': self.lam,
            'dc_success': self.dc_success,
            'sinr_success': self.sinr_success,
            'min_slot_sinr': self.min_slot_sinr,
            'max_hop_length': self.max_hop_length,
            'load_bound': self.load_bound,
            'txset_bound': self.txset_bound,
            'throughput_floor': self.throughput_floor,
            'wall_time': self.wall_time,
            'error': self.error,
        }

    def __repr__(self):
        return f"<ExperimentRecordRow gamma={self.gamma} n={self.n} trial={self.trial}>"
