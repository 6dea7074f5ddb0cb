import django.db.models.deletion
from django.db import migrations, models


class Migration(migrations.Migration):

    initial = True

    dependencies = []

    operations = [
        migrations.CreateModel(
            name='RunRecord',
            fields=[
                ('id', models.BigAutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('run_id', models.CharField(max_length=200, unique=True)),
                ('command', models.CharField(choices=[('validate', 'Corpus Validation'), ('arm', 'Rewrite Metric'), ('baseline', 'Baseline Detector'), ('synth', 'Synthetic Claims'), ('stats', 'Significance Test'), ('summarize', 'Run Summary')], max_length=20)),
                ('model_name', models.CharField(blank=True, max_length=100)),
                ('method', models.CharField(blank=True, help_text='Prompt variant or baseline method', max_length=50)),
                ('mode', models.CharField(blank=True, choices=[('live', 'Live'), ('record', 'Record'), ('replay', 'Replay')], max_length=10)),
                ('seed', models.IntegerField(default=0)),
                ('corpus_path', models.CharField(blank=True, max_length=500)),
                ('output_dir', models.CharField(max_length=500)),
                ('config_digest', models.CharField(max_length=64)),
                ('cache_digest', models.CharField(blank=True, max_length=64)),
                ('metrics', models.JSONField(blank=True, default=dict)),
                ('claim_count', models.IntegerField(default=0)),
                ('failure_count', models.IntegerField(default=0)),
                ('created_at', models.DateTimeField(auto_now_add=True)),
                ('updated_at', models.DateTimeField(auto_now=True)),
            ],
            options={
                'verbose_name': 'Run',
                'verbose_name_plural': 'Runs',
                'ordering': ['-updated_at'],
            },
        ),
        migrations.CreateModel(
            name='ClaimOutcome',
            fields=[
                ('id', models.BigAutoField(auto_created=True, primary_key=True, serialize=False, verbose_name='ID')),
                ('claim_id', models.CharField(max_length=200)),
                ('flagged', models.BooleanField(blank=True, null=True)),
                ('rewrite_text', models.TextField(blank=True)),
                ('edit_distance', models.IntegerField(blank=True, null=True)),
                ('normalized_edit_distance', models.FloatField(blank=True, null=True)),
                ('explanation_size', models.IntegerField(blank=True, null=True)),
                ('status', models.CharField(default='ok', help_text='ok, parse_failed or backend', max_length=20)),
                ('in_scope', models.BooleanField(default=True)),
                ('run', models.ForeignKey(on_delete=django.db.models.deletion.CASCADE, related_name='outcomes', to='reports.runrecord')),
            ],
            options={
                'ordering': ['run', 'claim_id'],
                'unique_together': {('run', 'claim_id')},
            },
        ),
    ]
