from functools import lru_cache
from typing import Optional

import pendulum
from sqlalchemy import JSON, Boolean, Column, DateTime, Float, ForeignKey, Integer, String, Text, create_engine, func
from sqlalchemy.orm import declarative_base, relationship, sessionmaker
from sqlalchemy.pool import StaticPool

import settings
from logger import LOGGER

Base = declarative_base()


def _utcnow():
    return pendulum.now("UTC").naive()


class ExperimentRun(Base):
    __tablename__ = "experiment_runs"

    id = Column(Integer, primary_key=True)
    run_id = Column(String(36), unique=True, nullable=False)
    created_at = Column(DateTime, default=_utcnow)

    # Configuration
    method = Column(Integer, nullable=False)
    dim = Column(Integer, nullable=False)
    N = Column(Integer, nullable=False)
    m = Column(Integer, nullable=False)
    coefficient = Column(String(255), nullable=False)
    scaling = Column(String(20), nullable=False)
    eta = Column(String(20), default="full")
    tol_face = Column(Float)
    tol_edge = Column(Float)

    # Results
    pnum1 = Column(Integer, default=0)
    pnum2 = Column(Integer, default=0)
    pnumE = Column(Integer, default=0)
    primal_total = Column(Integer, default=0)
    iterations = Column(Integer)
    converged = Column(Boolean, default=False)
    lambda_min = Column(Float)
    lambda_max = Column(Float)
    kappa = Column(Float)
    bound_constant = Column(Float)
    bound_value = Column(Float)
    bound_ok = Column(Boolean)
    gram_condition = Column(Float)
    direct_error = Column(Float)
    wall_time = Column(Float)
    residuals = Column(JSON)
    stages = Column(JSON)
    warnings = Column(JSON)

    # Relationships
    selections = relationship("ClassSelection", back_populates="run", cascade="all, delete-orphan", order_by="ClassSelection.class_id")
    audits = relationship("BoundAudit", back_populates="run", cascade="all, delete-orphan")

    @property
    def has_audits(self):
        return len(self.audits) > 0

    def to_dict(self, include_relations=False):
        base_dict = {
            "id": self.id,
            "run_id": self.run_id,
            "created_at": self.created_at.isoformat() if self.created_at else None,
            "method": self.method,
            "dim": self.dim,
            "N": self.N,
            "m": self.m,
            "coefficient": self.coefficient,
            "scaling": self.scaling,
            "eta": self.eta,
            "tol_face": self.tol_face,
            "tol_edge": self.tol_edge,
            "pnum1": self.pnum1,
            "pnum2": self.pnum2,
            "pnumE": self.pnumE,
            "primal_total": self.primal_total,
            "iterations": self.iterations,
            "converged": self.converged,
            "lambda_min": self.lambda_min,
            "lambda_max": self.lambda_max,
            "kappa": self.kappa,
            "bound_constant": self.bound_constant,
            "bound_value": self.bound_value,
            "bound_ok": self.bound_ok,
            "gram_condition": self.gram_condition,
            "direct_error": self.direct_error,
            "time": self.wall_time,
            "warnings": self.warnings or [],
            "has_audits": self.has_audits,
        }

        if include_relations:
            base_dict.update(
                {
                    "residuals": self.residuals or [],
                    "stages": self.stages or {},
                    "class_selections": [s.to_dict() for s in self.selections],
                    "audits": [a.to_dict() for a in self.audits],
                }
            )

        return base_dict


class ClassSelection(Base):
    __tablename__ = "class_selections"

    id = Column(Integer, primary_key=True)
    run_id = Column(Integer, ForeignKey("experiment_runs.id"), nullable=False)
    class_id = Column(Integer, nullable=False)
    kind = Column(String(10), nullable=False)
    multiplicity = Column(Integer)
    problem = Column(String(20))
    dofs = Column(Integer)
    selected = Column(Integer, default=0)
    infinite = Column(Integer, default=0)
    tolerance = Column(Float)

    run = relationship("ExperimentRun", back_populates="selections")

    def to_dict(self):
        return {
            "class_id": self.class_id,
            "kind": self.kind,
            "multiplicity": self.multiplicity,
            "problem": self.problem,
            "dofs": self.dofs,
            "selected": self.selected,
            "infinite": self.infinite,
            "tolerance": self.tolerance,
        }


class BoundAudit(Base):
    __tablename__ = "bound_audits"

    id = Column(Integer, primary_key=True)
    run_id = Column(Integer, ForeignKey("experiment_runs.id"), nullable=False)
    evaluator = Column(String(100), nullable=False)
    kappa_ok = Column(Boolean)
    lambda_min_ok = Column(Boolean)
    hard = Column(Boolean, default=True)
    message = Column(Text)
    timestamp = Column(DateTime, default=_utcnow)

    run = relationship("ExperimentRun", back_populates="audits")

    @property
    def passed(self):
        return bool(self.kappa_ok) and bool(self.lambda_min_ok)

    def to_dict(self):
        return {
            "id": self.id,
            "run_id": self.run_id,
            "evaluator": self.evaluator,
            "kappa_ok": self.kappa_ok,
            "lambda_min_ok": self.lambda_min_ok,
            "hard": self.hard,
            "passed": self.passed,
            "message": self.message,
            "timestamp": self.timestamp.isoformat() if self.timestamp else None,
        }


# Database setup
class DatabaseManager:
    def __init__(self, db_url="sqlite:///bddc_runs.db"):
        is_sqlite = db_url.startswith("sqlite")
        in_memory = is_sqlite and (db_url in ("sqlite://", "sqlite:///:memory:"))

        if in_memory:
            self.engine = create_engine(db_url, echo=False, poolclass=StaticPool, connect_args={"check_same_thread": False})
        elif is_sqlite:
            self.engine = create_engine(
                db_url,
                echo=False,
                pool_timeout=20,
                pool_recycle=3600,
                pool_pre_ping=True,
                connect_args={"timeout": 30, "check_same_thread": False},
            )
            # Enable WAL mode
            with self.engine.begin() as conn:
                conn.exec_driver_sql("PRAGMA journal_mode=WAL;")
                conn.exec_driver_sql("PRAGMA synchronous=NORMAL;")
        else:
            self.engine = create_engine(db_url, echo=False, pool_pre_ping=True)

        Base.metadata.create_all(self.engine)
        self.SessionLocal = sessionmaker(autocommit=False, autoflush=False, bind=self.engine)

    def get_session(self):
        return self.SessionLocal()

    def create_run(self, report):
        session = self.get_session()
        try:
            run = ExperimentRun(
                run_id=report.run_id,
                method=report.method,
                dim=report.dim,
                N=report.N,
                m=report.m,
                coefficient=report.coefficient,
                scaling=report.scaling,
                eta=report.eta,
                tol_face=report.tol_face,
                tol_edge=report.tol_edge,
                pnum1=report.pnum1,
                pnum2=report.pnum2,
                pnumE=report.pnumE,
                primal_total=report.primal_total,
                iterations=report.iterations,
                converged=report.converged,
                lambda_min=report.lambda_min,
                lambda_max=report.lambda_max,
                kappa=report.kappa,
                bound_constant=report.bound_constant,
                bound_value=report.bound_value,
                bound_ok=report.bound_ok,
                gram_condition=report.gram_condition,
                direct_error=report.direct_error,
                wall_time=report.time,
                residuals=list(report.residuals),
                stages=dict(report.stages),
                warnings=list(report.warnings),
            )
            for record in report.class_selections:
                run.selections.append(
                    ClassSelection(
                        class_id=record["class_id"],
                        kind=record["kind"],
                        multiplicity=record.get("multiplicity"),
                        problem=record.get("problem"),
                        dofs=record.get("dofs"),
                        selected=record.get("selected", 0),
                        infinite=record.get("infinite", 0),
                        tolerance=record.get("tolerance"),
                    )
                )
            session.add(run)
            session.commit()
            return run.id
        finally:
            session.close()

    def create_audit(self, run_id, audit):
        session = self.get_session()
        try:
            record = BoundAudit(
                run_id=run_id,
                evaluator=audit.get("evaluator", "bounds"),
                kappa_ok=audit.get("kappa_ok"),
                lambda_min_ok=audit.get("lambda_min_ok"),
                hard=audit.get("hard", True),
                message=audit.get("message"),
            )
            session.add(record)
            session.commit()
            return record.id
        finally:
            session.close()

    def get_runs(self, limit=50, method=None):
        session = self.get_session()
        try:
            query = session.query(ExperimentRun)
            if method is not None:
                query = query.filter(ExperimentRun.method == method)
            runs = query.order_by(ExperimentRun.created_at.desc(), ExperimentRun.id.desc()).limit(limit).all()
            return [run.to_dict() for run in runs]
        finally:
            session.close()

    def get_run_with_classes(self, run_id):
        session = self.get_session()
        try:
            run = session.query(ExperimentRun).filter_by(id=run_id).first()
            if not run:
                return None
            return run.to_dict(include_relations=True)
        finally:
            session.close()

    def get_unaudited_run_ids(self, limit=50):
        session = self.get_session()
        try:
            runs = (
                session.query(ExperimentRun)
                .outerjoin(BoundAudit)
                .filter(BoundAudit.id.is_(None))
                .order_by(ExperimentRun.created_at.desc())
                .limit(limit)
                .all()
            )
            return [run.id for run in runs]
        finally:
            session.close()

    def get_dashboard_stats(self):
        session = self.get_session()
        try:
            total_runs = session.query(ExperimentRun).count()
            converged_runs = session.query(ExperimentRun).filter(ExperimentRun.converged.is_(True)).count()
            total_audits = session.query(BoundAudit).count()
            passed_audits = (
                session.query(BoundAudit).filter(BoundAudit.kappa_ok.is_(True), BoundAudit.lambda_min_ok.is_(True)).count()
            )

            per_method = {}
            rows = (
                session.query(
                    ExperimentRun.method,
                    func.count(ExperimentRun.id),
                    func.avg(ExperimentRun.iterations),
                    func.avg(ExperimentRun.kappa),
                    func.max(ExperimentRun.kappa),
                )
                .group_by(ExperimentRun.method)
                .order_by(ExperimentRun.method)
                .all()
            )
            for method, count, avg_iterations, avg_kappa, max_kappa in rows:
                per_method[str(method)] = {
                    "runs": count,
                    "avg_iterations": round(avg_iterations, 2) if avg_iterations is not None else 0,
                    "avg_kappa": avg_kappa or 0,
                    "max_kappa": max_kappa or 0,
                }

            return {
                "totalRuns": total_runs,
                "convergedRuns": converged_runs,
                "totalAudits": total_audits,
                "auditPassRate": round(passed_audits / total_audits * 100, 1) if total_audits else 0,
                "methods": per_method,
            }
        finally:
            session.close()


@lru_cache(maxsize=None)
def _manager_for(db_url: str) -> DatabaseManager:
    LOGGER.info(f"Opening results database {db_url}")
    return DatabaseManager(db_url)


def get_db_manager(db_url: Optional[str] = None) -> Optional[DatabaseManager]:
    """Shared manager for `db_url` (or BDDC_DATABASE_URL); None when persistence is not configured"""
    db_url = db_url or settings.DATABASE_URL
    if not db_url:
        return None
    return _manager_for(db_url)
