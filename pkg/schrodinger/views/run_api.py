"""Read-only JSON endpoints for experiment runs"""
from django.http import JsonResponse
from django.views.decorators.http import require_http_methods
from django.shortcuts import get_object_or_404

from ..models import ExperimentRun, RunLog


def _run_summary(run):
    return {
        'id': run.id,
        'command': run.command,
        'status': run.status,
        'seed': run.seed,
        'created_at': run.created_at.isoformat(),
        'completed_at': run.completed_at.isoformat() if run.completed_at else None,
        'checks_passed': run.checks_passed,
        'checks_failed': run.checks_failed,
        'summary': run.summary,
    }


@require_http_methods(["GET"])
def api_runs(request):
    """Most recent runs, optionally filtered by command"""
    runs = ExperimentRun.objects.all()
    command = request.GET.get('command')
    if command:
        runs = runs.filter(command=command)

    return JsonResponse({
        'success': True,
        'runs': [_run_summary(run) for run in runs[:50]]
    })


@require_http_methods(["GET"])
def api_run_detail(request, run_id):
    """Options, check results and reconstruction points of one run"""
    run = get_object_or_404(ExperimentRun, id=run_id)

    data = _run_summary(run)
    data.update({
        'options': run.options,
        'output_dir': run.output_dir,
        'error_details': run.error_details,
        'checks': [{
            'name': check.name,
            'status': check.status,
            'measured': check.measured,
            'bound': check.bound,
            'reference': check.reference,
        } for check in run.checks.all()],
        'points': [{
            'z0': [point.z0_re, point.z0_im],
            'n': point.n,
            'qhat': [point.qhat_re, point.qhat_im],
            'qref': [point.qref_re, point.qref_im],
            'abs_err': point.abs_err,
            'bridge_gap': point.bridge_gap,
            'error': point.error,
        } for point in run.points.all()],
    })

    return JsonResponse({
        'success': True,
        'run': data
    })


@require_http_methods(["GET"])
def api_get_logs(request):
    """Get logs for a run (for polling)"""
    run_id = request.GET.get('run_id')
    if not run_id:
        return JsonResponse({'error': 'run_id required'}, status=400)

    try:
        after_id = int(request.GET.get('after_id', 0))
    except ValueError:
        return JsonResponse({'error': 'after_id must be an integer'}, status=400)

    run = get_object_or_404(ExperimentRun, id=run_id)

    logs = RunLog.objects.filter(
        run=run,
        id__gt=after_id
    ).order_by('id')[:100]  # Limit to 100 logs per request

    data = [{
        'id': log.id,
        'timestamp': log.timestamp.isoformat(),
        'level': log.level,
        'message': log.message,
        'metadata': log.metadata_dict
    } for log in logs]

    return JsonResponse(data, safe=False)
