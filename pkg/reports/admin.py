from django.contrib import admin
from .models import ClaimOutcome, RunRecord


class ClaimOutcomeInline(admin.TabularInline):
    model = ClaimOutcome
    extra = 0
    fields = ['claim_id', 'status', 'flagged', 'edit_distance', 'normalized_edit_distance', 'explanation_size']
    readonly_fields = fields
    can_delete = False


@admin.register(RunRecord)
class RunRecordAdmin(admin.ModelAdmin):
    list_display = ['run_id', 'command', 'model_name', 'method', 'mode', 'seed', 'claim_count', 'failure_count', 'failure_rate', 'updated_at']
    list_filter = ['command', 'mode', 'model_name', 'method']
    search_fields = ['run_id', 'model_name', 'corpus_path']
    date_hierarchy = 'created_at'
    readonly_fields = ['config_digest', 'cache_digest', 'metrics', 'created_at', 'updated_at']
    inlines = [ClaimOutcomeInline]

    fieldsets = (
        ('Run', {
            'fields': ('run_id', 'command', 'model_name', 'method', 'mode', 'seed')
        }),
        ('Inputs & Outputs', {
            'fields': ('corpus_path', 'output_dir', 'config_digest', 'cache_digest')
        }),
        ('Results', {
            'fields': ('metrics', 'claim_count', 'failure_count')
        }),
        ('Timestamps', {
            'fields': ('created_at', 'updated_at'),
            'classes': ('collapse',)
        }),
    )


@admin.register(ClaimOutcome)
class ClaimOutcomeAdmin(admin.ModelAdmin):
    list_display = ['claim_id', 'run', 'status', 'flagged', 'normalized_edit_distance', 'explanation_size']
    list_filter = ['status', 'flagged', 'in_scope', 'run__command']
    search_fields = ['claim_id', 'run__run_id', 'rewrite_text']
