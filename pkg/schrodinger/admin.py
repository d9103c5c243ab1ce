from django.contrib import admin
from .models import ExperimentRun, RunLog, CheckResult, ReconstructionPoint


class CheckResultInline(admin.TabularInline):
    model = CheckResult
    extra = 0
    readonly_fields = ['name', 'status', 'measured', 'bound', 'reference']


@admin.register(ExperimentRun)
class ExperimentRunAdmin(admin.ModelAdmin):
    list_display = ['id', 'command', 'status', 'seed', 'checks_passed', 'checks_failed', 'created_at']
    list_filter = ['command', 'status', 'created_at']
    search_fields = ['summary', 'error_details']
    readonly_fields = ['created_at', 'started_at', 'completed_at']
    inlines = [CheckResultInline]


@admin.register(RunLog)
class RunLogAdmin(admin.ModelAdmin):
    list_display = ['run', 'timestamp', 'level', 'message']
    list_filter = ['level', 'timestamp']
    search_fields = ['message']


@admin.register(CheckResult)
class CheckResultAdmin(admin.ModelAdmin):
    list_display = ['run', 'name', 'status', 'measured', 'bound']
    list_filter = ['status', 'name']
    search_fields = ['name', 'reference']


@admin.register(ReconstructionPoint)
class ReconstructionPointAdmin(admin.ModelAdmin):
    list_display = ['run', 'n', 'z0_re', 'z0_im', 'abs_err', 'bridge_gap']
    list_filter = ['n']
