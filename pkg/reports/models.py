from django.db import models


class RunRecord(models.Model):
    """One pipeline command execution and its headline numbers."""

    COMMAND_CHOICES = [
        ('validate', 'Corpus Validation'),
        ('arm', 'Rewrite Metric'),
        ('baseline', 'Baseline Detector'),
        ('synth', 'Synthetic Claims'),
        ('stats', 'Significance Test'),
        ('summarize', 'Run Summary'),
    ]

    MODE_CHOICES = [
        ('live', 'Live'),
        ('record', 'Record'),
        ('replay', 'Replay'),
    ]

    run_id = models.CharField(max_length=200, unique=True)
    command = models.CharField(max_length=20, choices=COMMAND_CHOICES)
    model_name = models.CharField(max_length=100, blank=True)
    method = models.CharField(max_length=50, blank=True, help_text="Prompt variant or baseline method")
    mode = models.CharField(max_length=10, choices=MODE_CHOICES, blank=True)
    seed = models.IntegerField(default=0)
    corpus_path = models.CharField(max_length=500, blank=True)
    output_dir = models.CharField(max_length=500)
    config_digest = models.CharField(max_length=64)
    cache_digest = models.CharField(max_length=64, blank=True)
    metrics = models.JSONField(default=dict, blank=True)
    claim_count = models.IntegerField(default=0)
    failure_count = models.IntegerField(default=0)
    created_at = models.DateTimeField(auto_now_add=True)
    updated_at = models.DateTimeField(auto_now=True)

    class Meta:
        ordering = ['-updated_at']
        verbose_name = 'Run'
        verbose_name_plural = 'Runs'

    def __str__(self):
        return f"{self.get_command_display()} - {self.run_id}"

    @property
    def failure_rate(self):
        if not self.claim_count:
            return 0.0
        return 100.0 * self.failure_count / self.claim_count


class ClaimOutcome(models.Model):
    """Per-claim prediction stored with its run."""

    run = models.ForeignKey(RunRecord, on_delete=models.CASCADE, related_name='outcomes')
    claim_id = models.CharField(max_length=200)
    flagged = models.BooleanField(null=True, blank=True)
    rewrite_text = models.TextField(blank=True)
    edit_distance = models.IntegerField(null=True, blank=True)
    normalized_edit_distance = models.FloatField(null=True, blank=True)
    explanation_size = models.IntegerField(null=True, blank=True)
    status = models.CharField(max_length=20, default='ok', help_text="ok, parse_failed or backend")
    in_scope = models.BooleanField(default=True)

    class Meta:
        ordering = ['run', 'claim_id']
        unique_together = ['run', 'claim_id']

    def __str__(self):
        return f"{self.run.run_id} / {self.claim_id}"
