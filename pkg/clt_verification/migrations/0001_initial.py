# Generated by Django 4.2.23 on 2026-10-18 09:12

from django.db import migrations, models
import django.utils.timezone


class Migration(migrations.Migration):

    initial = True

    dependencies = [
    ]

    operations = [
        migrations.CreateModel(
            name='ExperimentRun',
            fields=[
                ('id', models.AutoField(primary_key=True, serialize=False)),
                ('command', models.CharField(choices=[('covfit', 'Covariance decay fit'), ('clt_sweep', 'Subordinated CLT sweep'), ('smalljump', 'Small-jump CLT experiment'), ('flp', 'Fractional Levy process simulation'), ('ou_product', 'Wiener-Poisson OU product rate experiment')], max_length=20)),
                ('parameters', models.JSONField()),
                ('content_hash', models.CharField(max_length=64)),
                ('master_seed', models.BigIntegerField()),
                ('n', models.IntegerField(blank=True, null=True)),
                ('exit_code', models.IntegerField(default=0)),
                ('output_paths', models.JSONField(default=list)),
                ('summary', models.JSONField(blank=True, null=True)),
                ('created_at', models.DateTimeField(default=django.utils.timezone.now)),
            ],
            options={
                'db_table': 'experiment_runs',
                'ordering': ['-created_at'],
                'indexes': [models.Index(fields=['command'], name='idx_run_command'), models.Index(fields=['content_hash'], name='idx_run_hash')],
            },
        ),
    ]
