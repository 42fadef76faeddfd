import logging
from dataclasses import dataclass
from pathlib import Path

import pandas as pd
import torch
from torch.optim import AdamW
from torch.optim.lr_scheduler import CosineAnnealingLR
from tqdm import tqdm

from core.exceptions import PipelineConfigError, TrainingAborted
from core.utils import atomic_write_text, get_device, seed_everything
from networks.checkpoints import save_checkpoint
from networks.patchgan import PatchGANDiscriminator
from networks.unet import ConditionalUNet, UNetConfig
from weather.features import fit_standardizer

from .data import PairedDataset, make_loader
from .steps import gan_train_step, to_device, unet_step

logger = logging.getLogger(__name__)

CHECKPOINT_FILE = 'model.pt'
LAST_GOOD_FILE = 'last_good.pt'
HISTORY_FILE = 'history.csv'
UNET_COLUMNS = ('epoch', 'lr', 'total_loss', 'charbonnier', 'msssim_term',
                'lpips_term', 'grad_term', 'stats_term')
GAN_COLUMNS = ('epoch', 'lr', 'total_loss', 'adversarial_term', 'l1_term',
               'discriminator_loss')


@dataclass
class FoldOutcome:
    fold: int
    checkpoint: Path
    history: pd.DataFrame
    model: ConditionalUNet
    standardizer: object


def build_generator(cfg, preprocess):
    return ConditionalUNet(UNetConfig(
        input_size=preprocess.target_size, conditioned=cfg.conditioned))


def write_history(rows, columns, path):
    frame = pd.DataFrame(rows, columns=list(columns))
    atomic_write_text(path, frame.to_csv(index=False, lineterminator='\n'))
    return frame


class FoldTrainer:
    """Owns the models, optimizers and schedules of one fold."""

    def __init__(self, fold, samples, cfg, preprocess, out_dir, device=None):
        if not samples:
            raise PipelineConfigError(f'fold {fold}: empty training split')
        self.fold = fold
        self.cfg = cfg
        self.preprocess = preprocess
        self.out_dir = Path(out_dir)
        self.device = device or get_device()
        self.standardizer = fit_standardizer(
            [sample.vector for sample in samples], fold)

        seed_everything(cfg.seed)
        self.generator = build_generator(cfg, preprocess).to(self.device)
        self.optimizers = [self._optimizer(self.generator)]
        self.discriminator = None
        if cfg.model == 'pix2pix':
            self.discriminator = PatchGANDiscriminator().to(self.device)
            self.optimizers.append(self._optimizer(self.discriminator))
        self.schedulers = [
            CosineAnnealingLR(optimizer, T_max=cfg.epochs, eta_min=cfg.eta_min)
            for optimizer in self.optimizers
        ]
        self.dataset = PairedDataset(
            samples, self.standardizer, cfg.augment, cfg.seed)
        self.loader = make_loader(
            self.dataset, cfg.batch_size, shuffle=True, seed=cfg.seed)

    def _optimizer(self, module):
        return AdamW(module.parameters(), lr=self.cfg.lr,
                     weight_decay=self.cfg.weight_decay)

    @property
    def lr(self):
        return self.optimizers[0].param_groups[0]['lr']

    def start_finetune(self):
        for optimizer in self.optimizers:
            for group in optimizer.param_groups:
                group['lr'] = self.cfg.finetune_lr
        logger.info('fold %d: fine-tuning at lr %.2e for %d epochs',
                    self.fold, self.cfg.finetune_lr, self.cfg.finetune_epochs)

    def run_epoch(self, epoch):
        self.dataset.set_epoch(epoch)
        self.generator.train()
        if self.discriminator is not None:
            self.discriminator.train()
        totals, batches = {}, 0
        for batch in self.loader:
            batch = to_device(batch, self.device)
            if self.discriminator is None:
                values = unet_step(
                    self.generator, self.optimizers[0], batch,
                    self.cfg.loss_weights, self.cfg.charbonnier_eps
                ).as_floats()
                values['total_loss'] = values.pop('total')
            else:
                values = gan_train_step(
                    batch, self.generator, self.discriminator,
                    self.optimizers, self.cfg.lambda_l1)._asdict()
            for key, value in values.items():
                totals[key] = totals.get(key, 0.0) + value
            batches += 1
        return {key: value / batches for key, value in totals.items()}

    def save(self, path):
        return save_checkpoint(
            path, self.generator, self.cfg.model, self.standardizer,
            self.preprocess, discriminator=self.discriminator,
            extra={'fold': self.fold, 'seed': self.cfg.seed})

    def fit(self, progress=False):
        columns = UNET_COLUMNS if self.discriminator is None else GAN_COLUMNS
        history_path = self.out_dir / HISTORY_FILE
        last_good = None
        rows = []
        epochs = range(self.cfg.total_epochs)
        for epoch in tqdm(epochs, desc=f'fold {self.fold}',
                          disable=not progress):
            if epoch == self.cfg.epochs:
                self.start_finetune()
            lr = self.lr
            try:
                values = self.run_epoch(epoch)
            except TrainingAborted as exc:
                write_history(rows, columns, history_path)
                raise TrainingAborted(
                    f'fold {self.fold}, epoch {epoch}: {exc}',
                    last_good=last_good) from exc
            if epoch < self.cfg.epochs:
                for scheduler in self.schedulers:
                    scheduler.step()
            rows.append({'epoch': epoch, 'lr': lr, **values})
            last_good = self.save(self.out_dir / LAST_GOOD_FILE)
            write_history(rows, columns, history_path)
            logger.info(
                'fold %d epoch %d lr %.3e loss %.5f',
                self.fold, epoch, lr, values['total_loss'])
        history = write_history(rows, columns, history_path)
        checkpoint = self.save(self.out_dir / CHECKPOINT_FILE)
        self.generator.eval()
        return FoldOutcome(
            fold=self.fold, checkpoint=checkpoint, history=history,
            model=self.generator, standardizer=self.standardizer)


def train_fold(fold, samples, cfg, out_dir, preprocess, device=None,
               progress=False):
    trainer = FoldTrainer(fold, samples, cfg, preprocess, out_dir, device)
    logger.info('fold %d: training %s on %d samples for %d epochs',
                fold, cfg.model, len(samples), cfg.total_epochs)
    return trainer.fit(progress=progress)


def learning_rates(cfg):
    optimizer = AdamW([torch.zeros(1, requires_grad=True)], lr=cfg.lr)
    scheduler = CosineAnnealingLR(optimizer, T_max=cfg.epochs,
                                  eta_min=cfg.eta_min)
    rates = []
    for epoch in range(cfg.total_epochs):
        if epoch == cfg.epochs:
            optimizer.param_groups[0]['lr'] = cfg.finetune_lr
        rates.append(optimizer.param_groups[0]['lr'])
        if epoch < cfg.epochs:
            optimizer.step()
            scheduler.step()
    return rates
