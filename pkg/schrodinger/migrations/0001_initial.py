# Generated by Django 5.2.8 on 2026-10-18 10:00

from django.db import migrations, models
import django.db.models.deletion


class Migration(migrations.Migration):

    initial = True

    dependencies = [
    ]

    operations = [
        migrations.CreateModel(
            name='ExperimentRun',
            fields=[
                ('id', models.BigAutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('command', models.CharField(max_length=40)),
                ('status', models.CharField(choices=[('pending', 'Pending'), ('running', 'Running'), ('completed', 'Completed'), ('failed', 'Failed')], default='pending', max_length=20)),
                ('options', models.JSONField(blank=True, default=dict)),
                ('seed', models.IntegerField(default=0)),
                ('output_dir', models.CharField(blank=True, max_length=500)),
                ('created_at', models.DateTimeField(auto_now_add=True)),
                ('started_at', models.DateTimeField(blank=True, null=True)),
                ('completed_at', models.DateTimeField(blank=True, null=True)),
                ('checks_passed', models.IntegerField(default=0)),
                ('checks_failed', models.IntegerField(default=0)),
                ('summary', models.TextField(blank=True)),
                ('error_details', models.TextField(blank=True)),
            ],
            options={
                'ordering': ['-created_at'],
            },
        ),
        migrations.CreateModel(
            name='CheckResult',
            fields=[
                ('id', models.BigAutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('name', models.CharField(max_length=100)),
                ('status', models.CharField(choices=[('pass', 'Pass'), ('fail', 'Fail')], max_length=4)),
                ('measured', models.FloatField(blank=True, null=True)),
                ('bound', models.FloatField()),
                ('reference', models.CharField(blank=True, max_length=200)),
                ('run', models.ForeignKey(on_delete=django.db.models.deletion.CASCADE, related_name='checks', to='schrodinger.experimentrun')),
            ],
            options={
                'ordering': ['id'],
            },
        ),
        migrations.CreateModel(
            name='ReconstructionPoint',
            fields=[
                ('id', models.BigAutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('z0_re', models.FloatField()),
                ('z0_im', models.FloatField()),
                ('n', models.FloatField()),
                ('qhat_re', models.FloatField(blank=True, null=True)),
                ('qhat_im', models.FloatField(blank=True, null=True)),
                ('qref_re', models.FloatField(blank=True, null=True)),
                ('qref_im', models.FloatField(blank=True, null=True)),
                ('abs_err', models.FloatField(blank=True, null=True)),
                ('bridge_gap', models.FloatField(blank=True, null=True)),
                ('error', models.TextField(blank=True)),
                ('run', models.ForeignKey(on_delete=django.db.models.deletion.CASCADE, related_name='points', to='schrodinger.experimentrun')),
            ],
            options={
                'ordering': ['n', 'id'],
                'indexes': [models.Index(fields=['run', 'n'], name='schrodinger_point_run_n_idx')],
            },
        ),
        migrations.CreateModel(
            name='RunLog',
            fields=[
                ('id', models.BigAutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('timestamp', models.DateTimeField(auto_now_add=True)),
                ('level', models.CharField(choices=[('DEBUG', 'Debug'), ('INFO', 'Info'), ('WARNING', 'Warning'), ('ERROR', 'Error'), ('SUCCESS', 'Success'), ('CHECK', 'Check Result')], default='INFO', max_length=10)),
                ('message', models.TextField()),
                ('metadata', models.TextField(blank=True)),
                ('run', models.ForeignKey(on_delete=django.db.models.deletion.CASCADE, related_name='logs', to='schrodinger.experimentrun')),
            ],
            options={
                'ordering': ['timestamp', 'id'],
            },
        ),
    ]
