from django.db.models import Avg, Count, Manager, QuerySet


class RunQuerySet(QuerySet):

    def with_scores(self):
        scores = (
            self
            .annotate(
                fold_count=Count('folds', distinct=True),
                mean_psnr=Avg('folds__psnr_db'),
                mean_ssim=Avg('folds__ssim'),
                mean_lpips=Avg('folds__lpips'),
            )
        )
        return scores

    def finished(self):
        return self.filter(status='finished')

    def for_model(self, model_kind):
        return self.filter(model_kind=model_kind)


class RunManager(Manager):

    def get_queryset(self):
        return RunQuerySet(self.model, using=self._db)

    def with_scores(self) -> object:
        return self.get_queryset().with_scores()

    def finished(self) -> object:
        return self.get_queryset().finished()

    def for_model(self, model_kind) -> object:
        return self.get_queryset().for_model(model_kind)
