import logging
from dataclasses import dataclass
from typing import Mapping

import numpy as np
from sklearn.model_selection import PredefinedSplit

from core.exceptions import PipelineConfigError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class FoldAssignment:
    fold_of_group: Mapping[str, int]
    k: int = 5

    def fold_of(self, group_id):
        return self.fold_of_group[group_id]

    def test_fold(self, samples):
        return np.array([self.fold_of(sample.group_id) for sample in samples])

    def splits(self, samples):
        splitter = PredefinedSplit(self.test_fold(samples))
        for fold, (train, val) in enumerate(splitter.split()):
            yield fold, train, val

    def groups_in(self, fold):
        return sorted(
            group for group, index in self.fold_of_group.items()
            if index == fold)


def assign_folds(samples, k=5, seed=0):
    """Shuffle the distinct groups with ``seed``, deal them round-robin."""
    groups = sorted({sample.group_id for sample in samples})
    if len(groups) < k:
        raise PipelineConfigError(
            f'{len(groups)} groups cannot fill {k} folds')
    order = np.random.default_rng(seed).permutation(len(groups))
    fold_of_group = {
        groups[index]: position % k for position, index in enumerate(order)
    }
    logger.info('assigned %d groups to %d folds', len(groups), k)
    return FoldAssignment(fold_of_group=fold_of_group, k=k)
