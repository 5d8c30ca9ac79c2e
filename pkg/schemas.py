# schemas.py
from marshmallow import Schema, ValidationError, fields, validate, validates_schema


class InstanceSchema(Schema):
    n = fields.Integer(required=True, validate=validate.Range(min=2))
    gamma = fields.Float(required=True, validate=validate.Range(min=0))
    seed = fields.Integer(allow_none=True, load_default=None)
    nodes = fields.List(fields.List(fields.Float(), validate=validate.Length(equal=2)), required=True)
    pairs = fields.List(fields.List(fields.Integer(), validate=validate.Length(equal=2)), required=True)

    @validates_schema
    def check_sizes(self, data, **kwargs):
        if len(data["nodes"]) != data["n"] or len(data["pairs"]) != data["n"]:
            raise ValidationError("nodes and pairs must both have n entries")


class ScheduledRouteSchema(Schema):
    pair = fields.Integer(required=True)
    hops = fields.List(fields.List(fields.Integer(), validate=validate.Length(equal=2)), required=True)
    slots = fields.List(fields.Integer(validate=validate.Range(min=1)), required=True)

    @validates_schema
    def check_slots(self, data, **kwargs):
        if len(data["hops"]) != len(data["slots"]):
            raise ValidationError("every hop needs exactly one slot")


class SystemSchema(Schema):
    period = fields.Integer(required=True, validate=validate.Range(min=1))
    L = fields.Integer(required=True, validate=validate.Range(min=1))
    S = fields.Integer(required=True, validate=validate.Range(min=1))
    routes = fields.List(fields.Nested(ScheduledRouteSchema), required=True)
    report = fields.Dict(load_default=None, allow_none=True)


class SweepConfigSchema(Schema):
    """Sweep configuration file; keys mirror SweepConfig."""

    gammas = fields.List(fields.Float(validate=validate.Range(min=0)), required=True, validate=validate.Length(min=1))
    ns = fields.List(fields.Integer(validate=validate.Range(min=2)), required=True, validate=validate.Length(min=1))
    trials = fields.Integer(required=True, validate=validate.Range(min=1))
    alpha = fields.Float(load_default=3.0, validate=validate.Range(min=2, min_inclusive=False))
    beta = fields.Float(load_default=1.0, validate=validate.Range(min=0, min_inclusive=False))
    N0 = fields.Float(load_default=1.0, validate=validate.Range(min=0, min_inclusive=False))
    W = fields.Float(load_default=1.0, validate=validate.Range(min=0, min_inclusive=False))
    model = fields.String(load_default="B", validate=validate.OneOf(["A", "B"]))
    master_seed = fields.Integer(required=True, validate=validate.Range(min=0))
    mode = fields.String(load_default="theorem", validate=validate.OneOf(["theorem", "explicit"]))
    C = fields.Float(load_default=None, allow_none=True, validate=validate.Range(min=0, min_inclusive=False))
    D = fields.Float(load_default=None, allow_none=True, validate=validate.Range(min=0, min_inclusive=False))
    P = fields.Float(load_default=None, allow_none=True, validate=validate.Range(min=0, min_inclusive=False))
    out = fields.String(load_default="sweep.csv")
    cell_scale = fields.Float(load_default=1.0, validate=validate.Range(min=0, min_inclusive=False))
    connectivity_b = fields.Float(load_default=None, allow_none=True, validate=validate.Range(min=0, min_inclusive=False))
    workers = fields.Integer(load_default=None, allow_none=True, validate=validate.Range(min=1))
    record_timings = fields.Boolean(load_default=False)
    monotone_tolerance = fields.Float(load_default=2.0, validate=validate.Range(min=0))
    success_threshold = fields.Float(load_default=0.95, validate=validate.Range(min=0, max=1))

    @validates_schema
    def check_mode(self, data, **kwargs):
        if data["mode"] == "explicit" and data.get("C") is None:
            raise ValidationError("explicit mode needs C", field_name="C")
        if data["mode"] == "theorem" and data["model"] == "A":
            raise ValidationError("theorem mode is defined for model B only", field_name="model")


class RecordQuerySchema(Schema):
    gamma = fields.Float()
    n = fields.Integer()
    run_id = fields.Integer()


class ImportSchema(Schema):
    filename = fields.String(load_default="sweep.csv")


class BoundsQuerySchema(Schema):
    n = fields.Integer(required=True, validate=validate.Range(min=2))
    gamma = fields.Float(required=True, validate=validate.Range(min=0))
    C = fields.Float(required=True, validate=validate.Range(min=0, min_inclusive=False))
    D = fields.Float(required=True, validate=validate.Range(min=0, min_inclusive=False))
    W = fields.Float(load_default=1.0)
    b = fields.Float(load_default=None, allow_none=True)


class AdversarialQuerySchema(Schema):
    C = fields.Float(required=True, validate=validate.Range(min=0, min_inclusive=False))
    D = fields.Float(required=True, validate=validate.Range(min=0, min_inclusive=False))
    alpha = fields.Float(load_default=3.0, validate=validate.Range(min=2, min_inclusive=False))
    beta = fields.Float(required=True, validate=validate.Range(min=0, min_inclusive=False))
    m = fields.Integer(load_default=10000, validate=validate.Range(min=1))
