from django.db import models
from django.utils import timezone as django_timezone


# =============================================
# RUN LEDGER
# =============================================

class ExperimentRun(models.Model):
    COMMAND_CHOICES = [
        ('covfit', 'Covariance decay fit'),
        ('clt_sweep', 'Subordinated CLT sweep'),
        ('smalljump', 'Small-jump CLT experiment'),
        ('flp', 'Fractional Levy process simulation'),
        ('ou_product', 'Wiener-Poisson OU product rate experiment'),
    ]

    class Meta:
        db_table = 'experiment_runs'
        ordering = ['-created_at']
        indexes = [
            models.Index(fields=['command'], name='idx_run_command'),
            models.Index(fields=['content_hash'], name='idx_run_hash'),
        ]

    id = models.AutoField(primary_key=True)
    command = models.CharField(max_length=20, choices=COMMAND_CHOICES)
    parameters = models.JSONField()
    content_hash = models.CharField(max_length=64)
    master_seed = models.BigIntegerField()
    n = models.IntegerField(blank=True, null=True)
    exit_code = models.IntegerField(default=0)
    output_paths = models.JSONField(default=list)
    summary = models.JSONField(blank=True, null=True)
    created_at = models.DateTimeField(default=django_timezone.now)

    def __str__(self):
        return f"{self.command} seed={self.master_seed} (exit {self.exit_code})"
