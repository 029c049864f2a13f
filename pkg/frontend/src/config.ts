/** Training/inference settings for the toy conditional GAN. */

export const VALID_IMAGE_SIZES = [64, 128, 256] as const;

export interface GanConfig {
  /** Weight of the L1 reconstruction term added to the adversarial loss. */
  lambdaL1: number;
  /** Adam learning rate for both networks. */
  learningRate: number;
  /** Square side length the networks operate at. */
  imageSize: number;
  /** Number of stride-2 encoder stages in the generator. */
  unetDepth: number;
  /** Base filter count of the first encoder stage. */
  baseFilters: number;
  /** Seed for all weight initializers (training is deterministic given it). */
  seed: number;
  /** Training steps (one D update + one G update each). */
  steps: number;
  /** Pairs per update. */
  batchSize: number;
}

export const DEFAULT_CONFIG: GanConfig = {
  lambdaL1: 100,
  learningRate: 2e-4,
  imageSize: 256,
  unetDepth: 4,
  baseFilters: 16,
  seed: 0,
  steps: 2000,
  batchSize: 1,
};

export function validateConfig(config: GanConfig): GanConfig {
  if (config.lambdaL1 < 0) {
    throw new Error(`lambdaL1 must be >= 0, got ${config.lambdaL1}`);
  }
  if (!(VALID_IMAGE_SIZES as readonly number[]).includes(config.imageSize)) {
    throw new Error(
      `imageSize must be one of ${VALID_IMAGE_SIZES.join(', ')}, got ${config.imageSize}`);
  }
  if (config.unetDepth < 1 || config.unetDepth > Math.log2(config.imageSize)) {
    throw new Error(`unetDepth must be in [1, log2(imageSize)]`);
  }
  if (config.learningRate <= 0) {
    throw new Error('learningRate must be positive');
  }
  if (config.steps < 1 || config.batchSize < 1) {
    throw new Error('steps and batchSize must be >= 1');
  }
  return config;
}

export interface LossRecord {
  step: number;
  ganLossD: number;
  ganLossG: number;
  l1Loss: number;
}

export function lossLogToCsv(records: LossRecord[]): string {
  const lines = ['step,gan_loss_d,gan_loss_g,l1_loss'];
  for (const r of records) {
    if (r.l1Loss < 0) {
      throw new Error(`l1 loss must be >= 0, got ${r.l1Loss} at step ${r.step}`);
    }
    lines.push(`${r.step},${r.ganLossD},${r.ganLossG},${r.l1Loss}`);
  }
  return lines.join('\n') + '\n';
}
