from django.db import models
from django.utils import timezone
import json
import math


class ExperimentRun(models.Model):
    """One invocation of the cgolab command"""
    STATUS_CHOICES = [
        ('pending', 'Pending'),
        ('running', 'Running'),
        ('completed', 'Completed'),
        ('failed', 'Failed'),
    ]

    command = models.CharField(max_length=40)
    status = models.CharField(max_length=20, choices=STATUS_CHOICES, default='pending')
    options = models.JSONField(default=dict, blank=True)
    seed = models.IntegerField(default=0)
    output_dir = models.CharField(max_length=500, blank=True)

    created_at = models.DateTimeField(auto_now_add=True)
    started_at = models.DateTimeField(null=True, blank=True)
    completed_at = models.DateTimeField(null=True, blank=True)

    # Statistics
    checks_passed = models.IntegerField(default=0)
    checks_failed = models.IntegerField(default=0)

    # Summary
    summary = models.TextField(blank=True)
    error_details = models.TextField(blank=True)

    class Meta:
        ordering = ['-created_at']

    def __str__(self):
        return f"Run {self.id} - {self.command} - {self.status}"

    def add_log(self, message, level='INFO', metadata=None):
        """Helper to add a log entry"""
        return RunLog.objects.create(
            run=self,
            message=message,
            level=level,
            metadata=json.dumps(metadata) if metadata else ''
        )

    def start(self):
        self.status = 'running'
        self.started_at = timezone.now()
        self.save()

    def finish(self, status, summary='', error_details=''):
        self.status = status
        self.summary = summary
        self.error_details = error_details
        self.completed_at = timezone.now()
        self.save()

    def record_check(self, outcome):
        """Store a checks.CheckOutcome and update the counters"""
        CheckResult.objects.create(
            run=self,
            name=outcome.name,
            status=outcome.status,
            measured=outcome.measured if math.isfinite(outcome.measured) else None,
            bound=outcome.bound,
            reference=outcome.reference,
        )
        if outcome.passed:
            self.checks_passed += 1
        else:
            self.checks_failed += 1
        self.save(update_fields=['checks_passed', 'checks_failed'])
        self.add_log(outcome.summary_line(), 'CHECK', {'passed': outcome.passed})

    def record_point(self, estimate):
        """Store a reconstruct.PointEstimate"""
        def part(value):
            return value if math.isfinite(value) else None

        return ReconstructionPoint.objects.create(
            run=self,
            z0_re=estimate.z0.real,
            z0_im=estimate.z0.imag,
            n=estimate.n,
            qhat_re=part(estimate.qhat.real),
            qhat_im=part(estimate.qhat.imag),
            qref_re=part(estimate.qref.real),
            qref_im=part(estimate.qref.imag),
            abs_err=part(estimate.abs_err) if estimate.ok else None,
            bridge_gap=part(estimate.bridge_gap) if estimate.ok else None,
            error=estimate.error,
        )


class RunLog(models.Model):
    """Log lines of a run, polled by the JSON API"""
    LEVEL_CHOICES = [
        ('DEBUG', 'Debug'),
        ('INFO', 'Info'),
        ('WARNING', 'Warning'),
        ('ERROR', 'Error'),
        ('SUCCESS', 'Success'),
        ('CHECK', 'Check Result'),
    ]

    run = models.ForeignKey(ExperimentRun, on_delete=models.CASCADE, related_name='logs')
    timestamp = models.DateTimeField(auto_now_add=True)
    level = models.CharField(max_length=10, choices=LEVEL_CHOICES, default='INFO')
    message = models.TextField()
    metadata = models.TextField(blank=True)  # JSON string for additional data

    class Meta:
        ordering = ['timestamp', 'id']

    def __str__(self):
        return f"[{self.level}] {self.timestamp.strftime('%H:%M:%S')} - {self.message[:50]}"

    @property
    def metadata_dict(self):
        """Parse metadata JSON"""
        if self.metadata:
            try:
                return json.loads(self.metadata)
            except ValueError:
                return {}
        return {}


class CheckResult(models.Model):
    STATUS_CHOICES = [
        ('pass', 'Pass'),
        ('fail', 'Fail'),
    ]

    run = models.ForeignKey(ExperimentRun, on_delete=models.CASCADE, related_name='checks')
    name = models.CharField(max_length=100)
    status = models.CharField(max_length=4, choices=STATUS_CHOICES)
    measured = models.FloatField(null=True, blank=True)  # None when the measurement was not finite
    bound = models.FloatField()
    reference = models.CharField(max_length=200, blank=True)

    class Meta:
        ordering = ['id']

    def __str__(self):
        return f"{self.name}: {self.status}"


class ReconstructionPoint(models.Model):
    """One (n, z0) value of a reconstruct run"""
    run = models.ForeignKey(ExperimentRun, on_delete=models.CASCADE, related_name='points')
    z0_re = models.FloatField()
    z0_im = models.FloatField()
    n = models.FloatField()
    qhat_re = models.FloatField(null=True, blank=True)
    qhat_im = models.FloatField(null=True, blank=True)
    qref_re = models.FloatField(null=True, blank=True)
    qref_im = models.FloatField(null=True, blank=True)
    abs_err = models.FloatField(null=True, blank=True)
    bridge_gap = models.FloatField(null=True, blank=True)
    error = models.TextField(blank=True)

    class Meta:
        ordering = ['n', 'id']
        indexes = [
            models.Index(fields=['run', 'n'], name='schrodinger_point_run_n_idx'),
        ]

    def __str__(self):
        return f"n={self.n:g} z0=({self.z0_re:g}, {self.z0_im:g})"
