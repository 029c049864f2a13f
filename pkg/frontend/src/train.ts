/** Alternating-update training loop for the conditional GAN. */
import * as fs from 'fs';
import * as path from 'path';
import * as tf from '@tensorflow/tfjs';
import { saveConfig, saveModel } from './checkpoint';
import { GanConfig, LossRecord, lossLogToCsv, validateConfig } from './config';
import { Dataset, Stage, batchAt, findPairs, loadPairs } from './data';
import { discriminatorLoss, generatorGanLoss, l1Loss } from './loss';
import { buildDiscriminator, buildGenerator } from './model';

export interface TrainResult {
  generator: tf.LayersModel;
  discriminator: tf.LayersModel;
  log: LossRecord[];
}

function trainableVars(model: tf.LayersModel): tf.Variable[] {
  return model.trainableWeights.map(w => w.read() as unknown as tf.Variable);
}

/** One D step and one G step on a fixed batch; returns the loss record. */
function step(generator: tf.LayersModel, discriminator: tf.LayersModel,
              dOpt: tf.Optimizer, gOpt: tf.Optimizer, config: GanConfig,
              x: tf.Tensor4D, y: tf.Tensor4D, stepIndex: number): LossRecord {
  const record = { step: stepIndex, ganLossD: 0, ganLossG: 0, l1Loss: 0 };

  const dVars = trainableVars(discriminator);
  const dLoss = dOpt.minimize(() => {
    const fake = generator.apply(x, { training: true }) as tf.Tensor4D;
    const realLogits = discriminator.apply([x, y], { training: true }) as tf.Tensor;
    const fakeLogits = discriminator.apply([x, fake], { training: true }) as tf.Tensor;
    return discriminatorLoss(realLogits, fakeLogits);
  }, true, dVars);
  record.ganLossD = dLoss!.dataSync()[0];
  dLoss!.dispose();

  const gVars = trainableVars(generator);
  const gLoss = gOpt.minimize(() => {
    const fake = generator.apply(x, { training: true }) as tf.Tensor4D;
    const fakeLogits = discriminator.apply([x, fake], { training: true }) as tf.Tensor;
    const gan = generatorGanLoss(fakeLogits);
    const l1 = l1Loss(fake, y);
    record.ganLossG = gan.dataSync()[0];
    record.l1Loss = l1.dataSync()[0];
    return tf.add(gan, tf.mul(l1, config.lambdaL1)) as tf.Scalar;
  }, true, gVars);
  gLoss!.dispose();
  return record;
}

/** Train on an in-memory dataset (the unit tests drive this directly). */
export function trainOnDataset(data: Dataset, config: GanConfig): TrainResult {
  validateConfig(config);
  const generator = buildGenerator(config);
  const discriminator = buildDiscriminator(config);
  const dOpt = tf.train.adam(config.learningRate, 0.5);
  const gOpt = tf.train.adam(config.learningRate, 0.5);
  const log: LossRecord[] = [];
  for (let i = 0; i < config.steps; i++) {
    const { x, y } = batchAt(data, i, config.batchSize);
    log.push(step(generator, discriminator, dOpt, gOpt, config, x, y, i));
    x.dispose();
    y.dispose();
  }
  dOpt.dispose();
  gOpt.dispose();
  return { generator, discriminator, log };
}

/** CLI entry: load pairs, train, write checkpoint + loss log. */
export async function trainCommand(pairsDir: string, stage: Stage,
                                   outDir: string,
                                   config: GanConfig): Promise<TrainResult> {
  const data = loadPairs(findPairs(pairsDir, stage), config.imageSize);
  const result = trainOnDataset(data, config);
  await saveModel(result.generator, outDir, 'generator');
  await saveModel(result.discriminator, outDir, 'discriminator');
  saveConfig(config, outDir, stage);
  fs.writeFileSync(path.join(outDir, 'loss_log.csv'), lossLogToCsv(result.log));
  data.inputs.dispose();
  data.targets.dispose();
  return result;
}

/** Training-set mean L1 between generator outputs and targets. */
export function meanL1(generator: tf.LayersModel, data: Dataset): number {
  return tf.tidy(() => {
    const out = generator.apply(data.inputs, { training: false }) as tf.Tensor4D;
    return l1Loss(out, data.targets).dataSync()[0];
  });
}
