import threading

from flask import Flask, jsonify, request
from flask_cors import CORS

from database.models import get_db_manager
from evaluators.bounds import BoundEvaluator
from experiments.config import METHODS
from logger import LOGGER


def create_app(db_manager=None) -> Flask:
    app = Flask(__name__)
    CORS(app)

    def manager():
        db = db_manager or get_db_manager()
        if db is None:
            raise LookupError("No results database configured")
        return db

    @app.errorhandler(LookupError)
    def no_database(e):
        return jsonify({"error": str(e)}), 503

    @app.route("/api/health")
    def health_check():
        """Health check endpoint"""
        return jsonify({"status": "healthy", "database": (db_manager or get_db_manager()) is not None})

    @app.route("/api/methods", methods=["GET"])
    def get_methods():
        return jsonify({"methods": [spec.to_dict() for spec in METHODS.values()]})

    @app.route("/api/runs", methods=["GET"])
    def get_runs():
        """Get recent runs"""
        limit = request.args.get("limit", 20, type=int)
        method = request.args.get("method", None, type=int)
        if method is not None and method not in METHODS:
            return jsonify({"error": f"Unknown method: {method}"}), 400
        try:
            return jsonify(manager().get_runs(limit, method=method))
        except LookupError:
            raise
        except Exception as e:
            return jsonify({"error": str(e)}), 500

    @app.route("/api/runs/<int:run_id>", methods=["GET"])
    def get_run_detail(run_id):
        """Get a run with its class selections and audits"""
        try:
            run = manager().get_run_with_classes(run_id)
        except LookupError:
            raise
        except Exception as e:
            return jsonify({"error": str(e)}), 500

        if not run:
            return jsonify({"error": "Run not found"}), 404
        return jsonify(run)

    @app.route("/api/dashboard/stats", methods=["GET"])
    def get_dashboard_stats():
        """Get overall dashboard statistics"""
        try:
            return jsonify(manager().get_dashboard_stats())
        except LookupError:
            raise
        except Exception as e:
            return jsonify({"error": str(e)}), 500

    @app.route("/api/audits/run", methods=["POST"])
    def run_audits():
        """Audit unaudited runs in the background"""
        limit = request.json.get("limit", 50) if request.is_json else 50
        evaluator = BoundEvaluator(manager())

        def run_background_audit():
            try:
                evaluator.batch_evaluate_unevaluated(limit)
            except Exception as e:
                LOGGER.error(f"Background audit error: {e}")

        # Run in background thread
        threading.Thread(target=run_background_audit, daemon=True).start()

        return jsonify({"status": "audit_started", "message": f"Auditing up to {limit} runs"})

    return app


app = create_app()
