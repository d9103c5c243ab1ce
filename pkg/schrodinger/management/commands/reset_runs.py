"""
Management command to delete stored experiment runs.
Output files under the run directories are left alone.
"""
from django.core.management.base import BaseCommand
from django.db import transaction

from schrodinger.models import CheckResult, ExperimentRun, ReconstructionPoint, RunLog


class Command(BaseCommand):
    help = 'Delete experiment runs with their logs, check results and reconstruction points'

    def add_arguments(self, parser):
        parser.add_argument(
            '--command',
            dest='run_command',
            help='Delete only runs of this cgolab command (e.g. reconstruct)',
        )
        parser.add_argument(
            '--logs-only',
            action='store_true',
            help='Keep the runs, delete their log entries',
        )
        parser.add_argument(
            '--confirm',
            action='store_true',
            help='Skip confirmation prompt',
        )

    def handle(self, *args, **options):
        runs = ExperimentRun.objects.all()
        if options['run_command']:
            runs = runs.filter(command=options['run_command'])
        logs = RunLog.objects.filter(run__in=runs)

        self.stdout.write(self.style.WARNING('\n' + '=' * 60))
        self.stdout.write(self.style.WARNING('RUN DELETION TOOL'))
        self.stdout.write(self.style.WARNING('=' * 60 + '\n'))

        if not runs.exists():
            self.stdout.write(self.style.SUCCESS('No runs found - nothing to delete'))
            return

        if options['logs_only']:
            self.stdout.write(self.style.WARNING('Will delete run logs only'))
            self.stdout.write(f'  - {logs.count()} log entries of {runs.count()} runs')
        else:
            self.stdout.write('This includes:')
            self.stdout.write(f'  - {runs.count()} runs')
            self.stdout.write(f'  - {logs.count()} log entries')
            self.stdout.write(f'  - {CheckResult.objects.filter(run__in=runs).count()} check results')
            self.stdout.write(f'  - {ReconstructionPoint.objects.filter(run__in=runs).count()} reconstruction points')

        if not options['confirm']:
            self.stdout.write('')
            response = input('Are you sure? Type "yes" to confirm: ')
            if response.lower() != 'yes':
                self.stdout.write(self.style.ERROR('Cancelled'))
                return

        self.stdout.write('\nDeleting...')
        try:
            with transaction.atomic():
                deleted = logs.delete()[0]
                self.stdout.write(f'  ✓ Deleted {deleted} log entries')
                if not options['logs_only']:
                    deleted = runs.delete()[1].get('schrodinger.ExperimentRun', 0)
                    self.stdout.write(f'  ✓ Deleted {deleted} runs')
            self.stdout.write(self.style.SUCCESS('\n✓ Deletion complete!'))
        except Exception as e:
            self.stdout.write(self.style.ERROR(f'\n✗ Error during deletion: {str(e)}'))
            raise
