/** Checkpoint directory format: <name>.json topology + <name>.weights.bin. */
import * as fs from 'fs';
import * as path from 'path';
import * as tf from '@tensorflow/tfjs';
import { GanConfig } from './config';

export async function saveModel(model: tf.LayersModel, dir: string,
                                name: string): Promise<void> {
  fs.mkdirSync(dir, { recursive: true });
  await model.save(tf.io.withSaveHandler(async artifacts => {
    const weightData = artifacts.weightData as ArrayBuffer;
    fs.writeFileSync(path.join(dir, `${name}.weights.bin`),
                     Buffer.from(weightData));
    fs.writeFileSync(path.join(dir, `${name}.json`), JSON.stringify({
      modelTopology: artifacts.modelTopology,
      weightSpecs: artifacts.weightSpecs,
      format: 'layers-model',
      generatedBy: 'panofov-neural-generator',
    }));
    return {
      modelArtifactsInfo: {
        dateSaved: new Date(),
        modelTopologyType: 'JSON',
      },
    };
  }));
}

export async function loadModel(dir: string, name: string): Promise<tf.LayersModel> {
  const jsonPath = path.join(dir, `${name}.json`);
  const binPath = path.join(dir, `${name}.weights.bin`);
  if (!fs.existsSync(jsonPath) || !fs.existsSync(binPath)) {
    throw new Error(`checkpoint ${name} not found in ${dir}`);
  }
  const meta = JSON.parse(fs.readFileSync(jsonPath, 'utf8'));
  const weightData = fs.readFileSync(binPath);
  return tf.loadLayersModel(tf.io.fromMemory({
    modelTopology: meta.modelTopology,
    weightSpecs: meta.weightSpecs,
    weightData: weightData.buffer.slice(
      weightData.byteOffset, weightData.byteOffset + weightData.byteLength),
  }));
}

export function saveConfig(config: GanConfig, dir: string, stage: string): void {
  fs.mkdirSync(dir, { recursive: true });
  fs.writeFileSync(path.join(dir, 'config.json'),
                   JSON.stringify({ ...config, stage }, null, 2));
}

export function loadConfig(dir: string): GanConfig & { stage: string } {
  const p = path.join(dir, 'config.json');
  if (!fs.existsSync(p)) {
    throw new Error(`checkpoint config not found: ${p}`);
  }
  return JSON.parse(fs.readFileSync(p, 'utf8'));
}
